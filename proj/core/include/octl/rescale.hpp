// core/include/octl/rescale.hpp

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

#ifndef OCTL_RESCALE_HPP_
#define OCTL_RESCALE_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "octl/lattice.hpp"

namespace octl {

// Loss rescaling for utterances containing out-of-vocabulary words.
//
// Sentence level multiplies the whole utterance loss by mu.  Word level
// leaves the loss alone and instead multiplies the gradient contribution
// of every lattice node that belongs to an OOV word, so the emphasis is
// confined to the frames that can align with the new word.

enum class RescaleLevel {
  kSentence,
  kWord,
};

// Which lattice nodes count as part of an OOV word.  Emphasising only the
// label nodes lets the model obtain the extra reward while emitting the
// word's tokens repeatedly instead of closing it off with a blank, so the
// widest policy is the default.
enum class BlankPolicy {
  kLabelsOnly,
  kLabelsPlusInteriorBlanks,
  kLabelsInteriorAndTrailingBlank,
};

struct RescaleConfig {
  double mu = 1.0;  // must be > 0
  RescaleLevel level = RescaleLevel::kSentence;
  BlankPolicy blank_policy = BlankPolicy::kLabelsInteriorAndTrailingBlank;
  std::unordered_set<std::string> oov_words;  // stored lowercased

  bool IsOov(const std::string& word) const;
};

// One word of the reference, covering the token range [begin, end) of the
// unextended target sequence.
struct WordSpan {
  std::string word;
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Sets ext.oov_mark for every extended position covered by an OOV word
// under the configured blank policy.  The spans must partition the target
// token range exactly; anything else throws InvalidBoundaries.
ExtendedLabels MarkOovNodes(ExtendedLabels ext, std::span<const WordSpan> words,
                            const RescaleConfig& cfg);

// mu * loss when the utterance contains an OOV word, loss otherwise.
// Word-level configs return the loss unchanged: rescaling then lives in
// the gradient accumulation, not in the monitored objective.
double SentenceRescaledLoss(double loss, bool contains_oov,
                            const RescaleConfig& cfg);

// Occupancy matrix [S x T] with marked rows multiplied by mu.
Mat RescaleOccupancies(const Mat& occ, const ExtendedLabels& ext,
                       const RescaleConfig& cfg);

// Exact derivative of -ln P(y~|x) w.r.t. each posterior entry, with every
// marked node's contribution to the per-unit accumulation multiplied by
// mu.  The 1/P normalizer uses the unrescaled total, so unmarked entries
// are identical to the plain gradient.  mu = 1 or an unmarked ext gives
// the plain gradient.  Returns an [N x T] matrix.
Mat WordRescaledGradient(const Lattice& lat, const ExtendedLabels& ext,
                         const FramePosteriors& post, const RescaleConfig& cfg);

}  // namespace octl

#endif  // OCTL_RESCALE_HPP_
