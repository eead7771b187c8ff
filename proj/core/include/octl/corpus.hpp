// core/include/octl/corpus.hpp

// Copyright 2026  The octl authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OCTL_CORPUS_HPP_
#define OCTL_CORPUS_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "octl/inventory.hpp"
#include "octl/mat.hpp"
#include "octl/rng.hpp"

namespace octl {

// Synthetic word corpus over two-letter consonant-vowel pieces.  A word is
// a concatenation of 2..3 pieces; its subword units carry a trailing "_"
// on every piece except the last ("kolu" -> ko_, lu), so word boundaries
// survive the flat unit stream.  OOV words draw from a piece pool disjoint
// from the in-vocabulary pool, which keeps a source-trained model from
// ever emitting them by accident.

// Greedy longest-match segmentation of word against the non-blank unit
// texts.  Throws UncoverableWord when no unit matches at some position.
std::vector<int> Tokenize(const std::string& word, const TokenInventory& inv);

class Lexicon {
 public:
  // Builds invocab + oov words over the fixed piece pools; word shapes are
  // drawn from the seed.  Words are unique and contain no adjacent equal
  // pieces.
  static Lexicon Generate(std::size_t invocab, std::size_t oov,
                          std::uint64_t seed);

  const TokenInventory& inventory() const { return inventory_; }
  const std::vector<std::string>& words() const { return words_; }
  const std::unordered_set<std::string>& oov_words() const {
    return oov_words_;
  }
  std::vector<std::string> InvocabWords() const;
  std::vector<std::string> OovWords() const;

  bool IsOov(const std::string& word) const;
  bool Has(const std::string& word) const;

  // Unit ids for one word: greedy pieces with the continuation marker on
  // all but the last.
  std::vector<int> Tokens(const std::string& word) const;
  std::vector<int> SentenceTokens(const std::vector<std::string>& words) const;

  // Splits a decoded unit stream back into words at unmarked (word-final)
  // units.  A trailing run of continuation units flushes as a word.
  std::vector<std::string> Detokenize(const std::vector<int>& units) const;

  Lexicon(TokenInventory inventory, std::vector<std::string> words,
          std::unordered_set<std::string> oov_words);

 private:
  TokenInventory inventory_;
  std::vector<std::string> words_;
  std::unordered_set<std::string> oov_words_;
  std::unordered_set<std::string> word_set_;
};

struct SyntheticSpec {
  std::size_t feature_dim = 16;
  std::size_t frames_lo = 2;
  std::size_t frames_hi = 5;
  // Silence frames around words; silence carries the zero mean vector and
  // is the acoustic event the blank unit gets to absorb.  Set both to 0
  // for gap-free utterances.
  std::size_t silence_lo = 1;
  std::size_t silence_hi = 2;
  double noise_sigma = 0.3;
  std::uint64_t seed = 0;
};

struct UtteranceRecord {
  std::string id;
  std::vector<std::string> words;
  std::vector<int> tokens;  // unit ids; rebuilt from words on load
  FloatMat features;        // [T x d]
  bool contains_oov = false;
  std::string split;   // train | val | test
  std::string domain;  // source | target
};

// Unit mean vectors plus synthesis.  Means are a pure function of the
// spec seed with entries in [-1, 1]; a deterministic repair pass keeps
// all means (and the zero silence mean) at pairwise distance
// >= 0.5*sqrt(d) so the frame classifier has something to learn.
class Synthesizer {
 public:
  Synthesizer(const Lexicon& lex, const SyntheticSpec& spec);

  // Each token emits frames_lo..frames_hi frames of its unit mean plus
  // Gaussian noise; silence frames (the zero mean, aligned with blank)
  // fill word gaps and utterance edges.  Frame counts and noise come from
  // rng; an empty frames range override falls back to the spec.
  UtteranceRecord Utterance(const std::vector<std::string>& words, Rng& rng,
                            std::size_t frames_lo = 0,
                            std::size_t frames_hi = 0) const;

  const std::vector<double>& MeanFor(int unit) const;
  const SyntheticSpec& spec() const { return spec_; }

 private:
  const Lexicon* lex_;
  SyntheticSpec spec_;
  std::vector<std::vector<double>> means_;  // per unit id; blank row unused
  std::vector<double> silence_;
};

struct SplitSizes {
  std::size_t source_train = 240;
  std::size_t source_val = 40;
  std::size_t target_total = 60;  // split 9:1 into train/val
  std::size_t oov_test = 60;
  std::size_t invocab_test = 60;
  // Target-domain sentences draw their in-vocab filler from only the
  // first target_support in-vocab words, so fine-tuning exercises a
  // narrow slice of the old vocabulary.
  std::size_t target_support = 4;
};

struct Dataset {
  Lexicon lexicon;
  std::vector<UtteranceRecord> records;

  std::vector<const UtteranceRecord*> Select(const std::string& domain,
                                             const std::string& split) const;
};

// Source splits use in-vocab words only; target splits are 3..8-word
// sentences with exactly 1..2 OOV words each, and every OOV word appears
// in both target train and the OOV test split.  The OOV test split stands
// in for real recordings: its own noise stream and a frames range shifted
// up by one.
Dataset BuildSplits(const Lexicon& lex, const SyntheticSpec& spec,
                    const SplitSizes& sizes);

// Zeroes two random contiguous feature-dimension bands of width
// <= max_width across all frames.  Training-time augmentation only.
void MaskAugment(FloatMat& features, Rng& rng, std::size_t max_width);

// Directory layout: manifest.tsv (id, split, domain, contains_oov, words,
// blob offset, blob length), features.ctcf (magic "CTCF", u32 record
// count, then per record u32 T, u32 d, T*d little-endian f32), and
// lexicon.txt.  Malformed magic or truncation reads as CorruptDataset.
void WriteDataset(const std::filesystem::path& dir, const Dataset& ds);
Dataset ReadDataset(const std::filesystem::path& dir);

}  // namespace octl

#endif  // OCTL_CORPUS_HPP_
