// core/src/corpus.cpp

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

#include "octl/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <span>
#include <sstream>

#include "octl/error.hpp"

namespace octl {

namespace {

// Consonant-vowel pieces; the two pools share no piece, so OOV words and
// in-vocabulary words share no subword unit either.
const char* const kInvocabPieces[] = {
    "ba", "de", "fi", "go", "hu", "ja", "ke", "li", "mo", "nu", "pa", "re",
    "si", "to", "vu", "wa", "ye", "zi", "bo", "du", "fa", "ge", "hi", "ju",
};
const char* const kOovPieces[] = {
    "ko", "lu", "ma", "ne", "pi", "ro", "su", "ta", "vi", "wo", "za", "be",
};
constexpr std::size_t kNumInvocabPieces = std::size(kInvocabPieces);
constexpr std::size_t kNumOovPieces = std::size(kOovPieces);

std::vector<std::string> MakeWords(std::span<const char* const> pool,
                                   std::size_t count, Rng& rng,
                                   std::unordered_set<std::string>& taken) {
  std::vector<std::string> out;
  out.reserve(count);
  int guard = 0;
  while (out.size() < count) {
    if (++guard > 100000) {
      Throw(ErrorCode::kConfigError,
            "piece pool too small for the requested word count");
    }
    const std::size_t len = 2 + rng.UniformInt(2);  // 2..3 pieces
    std::string word;
    std::size_t prev = pool.size();
    bool ok = true;
    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t pick = rng.UniformInt(pool.size());
      if (pick == prev) {
        ok = false;
        break;
      }
      word += pool[pick];
      prev = pick;
    }
    if (!ok || taken.count(word)) continue;
    taken.insert(word);
    out.push_back(std::move(word));
  }
  return out;
}

}  // namespace

std::vector<int> Tokenize(const std::string& word, const TokenInventory& inv) {
  if (word.empty()) {
    Throw(ErrorCode::kUncoverableWord, "empty word");
  }
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < word.size()) {
    int best = -1;
    std::size_t best_len = 0;
    for (int id = 0; id < static_cast<int>(inv.size()); ++id) {
      if (id == inv.blank_id()) continue;
      const std::string& text = inv.token(id);
      if (text.size() <= best_len || text.size() > word.size() - pos) continue;
      if (word.compare(pos, text.size(), text) == 0) {
        best = id;
        best_len = text.size();
      }
    }
    if (best < 0) {
      Throw(ErrorCode::kUncoverableWord,
            "no unit matches \"" + word + "\" at offset " +
                std::to_string(pos));
    }
    out.push_back(best);
    pos += best_len;
  }
  return out;
}

Lexicon::Lexicon(TokenInventory inventory, std::vector<std::string> words,
                 std::unordered_set<std::string> oov_words)
    : inventory_(std::move(inventory)),
      words_(std::move(words)),
      oov_words_(std::move(oov_words)) {
  for (const auto& w : words_) word_set_.insert(w);
  for (const auto& w : oov_words_) {
    if (!word_set_.count(w)) {
      Throw(ErrorCode::kConfigError, "OOV word " + w + " not in the lexicon");
    }
  }
  for (const auto& w : words_) Tokens(w);  // every word must tokenize
}

Lexicon Lexicon::Generate(std::size_t invocab, std::size_t oov,
                          std::uint64_t seed) {
  std::vector<std::string> texts = {"<blank>"};
  auto add_pieces = [&texts](std::span<const char* const> pool) {
    for (const char* piece : pool) {
      texts.push_back(std::string(piece) + "_");
      texts.push_back(piece);
    }
  };
  add_pieces({kInvocabPieces, kNumInvocabPieces});
  add_pieces({kOovPieces, kNumOovPieces});
  TokenInventory inv(texts, 0);

  Rng rng(DeriveSeed(seed, 17));
  std::unordered_set<std::string> taken;
  auto invocab_words =
      MakeWords({kInvocabPieces, kNumInvocabPieces}, invocab, rng, taken);
  auto oov_words = MakeWords({kOovPieces, kNumOovPieces}, oov, rng, taken);

  std::vector<std::string> words = invocab_words;
  words.insert(words.end(), oov_words.begin(), oov_words.end());
  return Lexicon(std::move(inv), std::move(words),
                 {oov_words.begin(), oov_words.end()});
}

std::vector<std::string> Lexicon::InvocabWords() const {
  std::vector<std::string> out;
  for (const auto& w : words_) {
    if (!oov_words_.count(w)) out.push_back(w);
  }
  return out;
}

std::vector<std::string> Lexicon::OovWords() const {
  std::vector<std::string> out;
  for (const auto& w : words_) {
    if (oov_words_.count(w)) out.push_back(w);
  }
  return out;
}

bool Lexicon::IsOov(const std::string& word) const {
  return oov_words_.count(word) > 0;
}

bool Lexicon::Has(const std::string& word) const {
  return word_set_.count(word) > 0;
}

std::vector<int> Lexicon::Tokens(const std::string& word) const {
  std::vector<int> ids = Tokenize(word, inventory_);
  for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
    const int cont = inventory_.id(inventory_.token(ids[i]) + "_");
    if (cont < 0) {
      Throw(ErrorCode::kUncoverableWord,
            "no continuation unit for " + inventory_.token(ids[i]));
    }
    ids[i] = cont;
  }
  return ids;
}

std::vector<int> Lexicon::SentenceTokens(
    const std::vector<std::string>& words) const {
  std::vector<int> out;
  for (const auto& w : words) {
    const auto toks = Tokens(w);
    out.insert(out.end(), toks.begin(), toks.end());
  }
  return out;
}

std::vector<std::string> Lexicon::Detokenize(
    const std::vector<int>& units) const {
  std::vector<std::string> out;
  std::string current;
  for (int u : units) {
    if (u == inventory_.blank_id()) continue;
    const std::string& text = inventory_.token(u);
    if (!text.empty() && text.back() == '_') {
      current += text.substr(0, text.size() - 1);
    } else {
      current += text;
      out.push_back(current);
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

Synthesizer::Synthesizer(const Lexicon& lex, const SyntheticSpec& spec)
    : lex_(&lex), spec_(spec) {
  if (spec.frames_lo < 1 || spec.frames_lo > spec.frames_hi ||
      spec.silence_lo > spec.silence_hi) {
    Throw(ErrorCode::kConfigError, "bad frames_per_token range");
  }
  if (spec.noise_sigma < 0.0) {
    Throw(ErrorCode::kConfigError, "negative noise_sigma");
  }
  const std::size_t d = spec.feature_dim;
  const double min_dist = 0.5 * std::sqrt(static_cast<double>(d));
  silence_.assign(d, 0.0);

  const auto& inv = lex.inventory();
  means_.resize(inv.size());
  auto dist = [d](const std::vector<double>& a, const std::vector<double>& b) {
    double sq = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      sq += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return std::sqrt(sq);
  };
  for (int k = 0; k < static_cast<int>(inv.size()); ++k) {
    if (k == inv.blank_id()) continue;
    Rng rng(DeriveSeed(spec.seed, 1000 + static_cast<std::uint64_t>(k)));
    auto& mean = means_[k];
    mean.resize(d);
    for (int attempt = 0;; ++attempt) {
      if (attempt > 10000) {
        Throw(ErrorCode::kConfigError,
              "cannot separate unit means at this feature_dim");
      }
      for (double& m : mean) m = rng.Uniform(-1.0, 1.0);
      bool clear = dist(mean, silence_) >= min_dist;
      for (int j = 0; clear && j < k; ++j) {
        if (j == inv.blank_id()) continue;
        clear = dist(mean, means_[j]) >= min_dist;
      }
      if (clear) break;
    }
  }
}

const std::vector<double>& Synthesizer::MeanFor(int unit) const {
  if (unit < 0 || unit >= static_cast<int>(means_.size()) ||
      unit == lex_->inventory().blank_id()) {
    Throw(ErrorCode::kInvalidLabel, "no mean for unit " + std::to_string(unit));
  }
  return means_[unit];
}

UtteranceRecord Synthesizer::Utterance(const std::vector<std::string>& words,
                                       Rng& rng, std::size_t frames_lo,
                                       std::size_t frames_hi) const {
  if (frames_lo == 0) frames_lo = spec_.frames_lo;
  if (frames_hi == 0) frames_hi = spec_.frames_hi;
  if (words.empty()) {
    Throw(ErrorCode::kEmptyTarget, "utterance needs at least one word");
  }

  UtteranceRecord rec;
  rec.words = words;
  const std::size_t d = spec_.feature_dim;

  std::vector<const std::vector<double>*> frame_means;
  auto emit_silence = [&] {
    const std::size_t n =
        spec_.silence_lo +
        rng.UniformInt(spec_.silence_hi - spec_.silence_lo + 1);
    for (std::size_t i = 0; i < n; ++i) frame_means.push_back(&silence_);
  };
  emit_silence();
  for (const auto& word : words) {
    rec.contains_oov = rec.contains_oov || lex_->IsOov(word);
    for (int tok : lex_->Tokens(word)) {
      rec.tokens.push_back(tok);
      const std::size_t r =
          frames_lo + rng.UniformInt(frames_hi - frames_lo + 1);
      for (std::size_t i = 0; i < r; ++i) {
        frame_means.push_back(&means_[tok]);
      }
    }
    emit_silence();
  }

  rec.features = FloatMat(frame_means.size(), d);
  for (std::size_t t = 0; t < frame_means.size(); ++t) {
    const auto& mean = *frame_means[t];
    for (std::size_t k = 0; k < d; ++k) {
      rec.features(t, k) = static_cast<float>(
          mean[k] + rng.Normal(0.0, spec_.noise_sigma));
    }
  }
  return rec;
}

std::vector<const UtteranceRecord*> Dataset::Select(
    const std::string& domain, const std::string& split) const {
  std::vector<const UtteranceRecord*> out;
  for (const auto& rec : records) {
    if (rec.domain == domain && rec.split == split) out.push_back(&rec);
  }
  return out;
}

namespace {

std::vector<std::string> SourceSentence(const std::vector<std::string>& vocab,
                                        Rng& rng) {
  const std::size_t len = 3 + rng.UniformInt(6);  // 3..8 words
  std::vector<std::string> words;
  while (words.size() < len) {
    const auto& w = vocab[rng.UniformInt(vocab.size())];
    if (!words.empty() && words.back() == w) continue;
    words.push_back(w);
  }
  return words;
}

// 3..8 words with exactly 1..2 OOV words.  forced_oov, when non-empty,
// pins the first OOV slot so split construction can guarantee coverage.
std::vector<std::string> TargetSentence(const std::vector<std::string>& filler,
                                        const std::vector<std::string>& oov,
                                        const std::string& forced_oov,
                                        Rng& rng) {
  const std::size_t len = 3 + rng.UniformInt(6);
  const std::size_t n_oov = 1 + rng.UniformInt(2);
  std::vector<std::size_t> positions;
  positions.push_back(rng.UniformInt(len));
  if (n_oov == 2 && len >= 2) {
    for (;;) {
      const std::size_t p = rng.UniformInt(len);
      if (p != positions[0]) {
        positions.push_back(p);
        break;
      }
    }
  }
  std::sort(positions.begin(), positions.end());

  std::vector<std::string> words(len);
  for (std::size_t idx = 0; idx < positions.size(); ++idx) {
    const std::string& w = (idx == 0 && !forced_oov.empty())
                               ? forced_oov
                               : oov[rng.UniformInt(oov.size())];
    words[positions[idx]] = w;
  }
  for (std::size_t i = 0; i < len; ++i) {
    if (!words[i].empty()) continue;
    for (;;) {
      const auto& w = filler[rng.UniformInt(filler.size())];
      if (i > 0 && words[i - 1] == w) continue;
      if (i + 1 < len && words[i + 1] == w) continue;
      words[i] = w;
      break;
    }
  }
  // Adjacent equal OOV picks are possible when both slots drew the same
  // word next to each other; redraw the second from the filler in that
  // case is wrong (it must stay OOV), so nudge it to the next OOV word.
  for (std::size_t i = 0; i + 1 < len; ++i) {
    if (words[i] == words[i + 1]) {
      const auto it = std::find(oov.begin(), oov.end(), words[i + 1]);
      const std::size_t at = static_cast<std::size_t>(it - oov.begin());
      words[i + 1] = oov[(at + 1) % oov.size()];
    }
  }
  return words;
}

}  // namespace

Dataset BuildSplits(const Lexicon& lex, const SyntheticSpec& spec,
                    const SplitSizes& sizes) {
  if (sizes.source_train == 0 || sizes.source_val == 0 ||
      sizes.target_total < 10 || sizes.oov_test == 0 ||
      sizes.invocab_test == 0 || sizes.target_support == 0) {
    Throw(ErrorCode::kConfigError, "split sizes must be positive");
  }
  const auto invocab = lex.InvocabWords();
  const auto oov = lex.OovWords();
  if (oov.empty() || invocab.size() < sizes.target_support) {
    Throw(ErrorCode::kConfigError, "lexicon too small for these splits");
  }
  const std::size_t target_train_n = static_cast<std::size_t>(
      std::llround(0.9 * static_cast<double>(sizes.target_total)));
  const std::size_t target_val_n = sizes.target_total - target_train_n;
  if (target_train_n < oov.size() || sizes.oov_test < oov.size()) {
    Throw(ErrorCode::kConfigError,
          "too few target utterances to cover every OOV word");
  }

  std::vector<std::string> support(invocab.begin(),
                                   invocab.begin() + sizes.target_support);

  Dataset ds{lex, {}};
  const Synthesizer synth(ds.lexicon, spec);

  char id_buf[64];
  auto add = [&](const char* prefix, std::size_t i, const char* domain,
                 const char* split, UtteranceRecord rec) {
    std::snprintf(id_buf, sizeof(id_buf), "%s_%04zu", prefix, i);
    rec.id = id_buf;
    rec.domain = domain;
    rec.split = split;
    ds.records.push_back(std::move(rec));
  };

  {
    Rng rng(DeriveSeed(spec.seed, 101));
    for (std::size_t i = 0; i < sizes.source_train; ++i) {
      add("src_train", i, "source", "train",
          synth.Utterance(SourceSentence(invocab, rng), rng));
    }
  }
  {
    Rng rng(DeriveSeed(spec.seed, 102));
    for (std::size_t i = 0; i < sizes.source_val; ++i) {
      add("src_val", i, "source", "val",
          synth.Utterance(SourceSentence(invocab, rng), rng));
    }
  }
  {
    Rng rng(DeriveSeed(spec.seed, 103));
    for (std::size_t i = 0; i < target_train_n; ++i) {
      const auto& forced = oov[i % oov.size()];
      add("tgt_train", i, "target", "train",
          synth.Utterance(TargetSentence(support, oov, forced, rng), rng));
    }
    for (std::size_t i = 0; i < target_val_n; ++i) {
      add("tgt_val", i, "target", "val",
          synth.Utterance(TargetSentence(support, oov, "", rng), rng));
    }
  }
  {
    Rng rng(DeriveSeed(spec.seed, 104));
    for (std::size_t i = 0; i < sizes.oov_test; ++i) {
      const auto& forced = oov[i % oov.size()];
      add("oov_test", i, "target", "test",
          synth.Utterance(TargetSentence(support, oov, forced, rng), rng,
                          spec.frames_lo + 1, spec.frames_hi + 1));
    }
  }
  {
    Rng rng(DeriveSeed(spec.seed, 105));
    for (std::size_t i = 0; i < sizes.invocab_test; ++i) {
      add("iv_test", i, "source", "test",
          synth.Utterance(SourceSentence(invocab, rng), rng));
    }
  }
  return ds;
}

void MaskAugment(FloatMat& features, Rng& rng, std::size_t max_width) {
  if (max_width == 0) return;
  if (max_width >= features.cols) {
    Throw(ErrorCode::kConfigError, "mask width must stay below feature_dim");
  }
  for (int band = 0; band < 2; ++band) {
    const std::size_t w = rng.UniformInt(max_width + 1);
    if (w == 0) continue;
    const std::size_t start = rng.UniformInt(features.cols - w + 1);
    for (std::size_t t = 0; t < features.rows; ++t) {
      for (std::size_t k = start; k < start + w; ++k) {
        features(t, k) = 0.0f;
      }
    }
  }
}

namespace {

constexpr char kBlobMagic[4] = {'C', 'T', 'C', 'F'};

void PutU32(std::ostream& os, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t GetU32(std::istream& is) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    const int c = is.get();
    if (c == EOF) Throw(ErrorCode::kCorruptDataset, "truncated feature blob");
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

std::string JoinWords(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out += ' ';
    out += words[i];
  }
  return out;
}

std::vector<std::string> SplitFields(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

void WriteDataset(const std::filesystem::path& dir, const Dataset& ds) {
  std::filesystem::create_directories(dir);

  std::ofstream blob(dir / "features.ctcf", std::ios::binary | std::ios::trunc);
  if (!blob) Throw(ErrorCode::kIoError, "cannot write features.ctcf");
  blob.write(kBlobMagic, 4);
  PutU32(blob, static_cast<std::uint32_t>(ds.records.size()));

  std::ofstream manifest(dir / "manifest.tsv", std::ios::trunc);
  if (!manifest) Throw(ErrorCode::kIoError, "cannot write manifest.tsv");

  for (const auto& rec : ds.records) {
    const auto offset = static_cast<std::uint64_t>(blob.tellp());
    PutU32(blob, static_cast<std::uint32_t>(rec.features.rows));
    PutU32(blob, static_cast<std::uint32_t>(rec.features.cols));
    for (float v : rec.features.data) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      PutU32(blob, bits);
    }
    const auto length = static_cast<std::uint64_t>(blob.tellp()) - offset;
    manifest << rec.id << '\t' << rec.split << '\t' << rec.domain << '\t'
             << (rec.contains_oov ? 1 : 0) << '\t' << JoinWords(rec.words)
             << '\t' << offset << '\t' << length << '\n';
  }
  blob.flush();
  manifest.flush();
  if (!blob || !manifest) Throw(ErrorCode::kIoError, "dataset write failed");

  std::ofstream lexfile(dir / "lexicon.txt", std::ios::trunc);
  const auto& inv = ds.lexicon.inventory();
  for (std::size_t id = 0; id < inv.size(); ++id) {
    lexfile << "unit\t" << inv.token(static_cast<int>(id)) << '\n';
  }
  for (const auto& w : ds.lexicon.words()) {
    lexfile << "word\t" << w << '\t' << (ds.lexicon.IsOov(w) ? "oov" : "iv")
            << '\n';
  }
  lexfile.flush();
  if (!lexfile) Throw(ErrorCode::kIoError, "lexicon write failed");
}

namespace {

Lexicon ReadLexiconFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Throw(ErrorCode::kCorruptDataset, "missing " + path.string());
  std::vector<std::string> units;
  std::vector<std::string> words;
  std::unordered_set<std::string> oov;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = SplitFields(line, '\t');
    if (fields[0] == "unit" && fields.size() == 2) {
      units.push_back(fields[1]);
    } else if (fields[0] == "word" && fields.size() == 3) {
      words.push_back(fields[1]);
      if (fields[2] == "oov") {
        oov.insert(fields[1]);
      } else if (fields[2] != "iv") {
        Throw(ErrorCode::kCorruptDataset, "bad word tag " + fields[2]);
      }
    } else {
      Throw(ErrorCode::kCorruptDataset, "bad lexicon line: " + line);
    }
  }
  const auto blank = std::find(units.begin(), units.end(), "<blank>");
  if (blank == units.end()) {
    Throw(ErrorCode::kCorruptDataset, "lexicon has no <blank> unit");
  }
  TokenInventory inv(units, static_cast<int>(blank - units.begin()));
  return Lexicon(std::move(inv), std::move(words), std::move(oov));
}

}  // namespace

Dataset ReadDataset(const std::filesystem::path& dir) {
  Lexicon lex = ReadLexiconFile(dir / "lexicon.txt");

  std::ifstream blob(dir / "features.ctcf", std::ios::binary);
  if (!blob) Throw(ErrorCode::kCorruptDataset, "missing features.ctcf");
  char magic[4];
  blob.read(magic, 4);
  if (blob.gcount() != 4 || std::memcmp(magic, kBlobMagic, 4) != 0) {
    Throw(ErrorCode::kCorruptDataset, "bad feature blob magic");
  }
  const std::uint32_t count = GetU32(blob);

  std::ifstream manifest(dir / "manifest.tsv");
  if (!manifest) Throw(ErrorCode::kCorruptDataset, "missing manifest.tsv");

  Dataset ds{std::move(lex), {}};
  std::string line;
  while (std::getline(manifest, line)) {
    if (line.empty()) continue;
    const auto fields = SplitFields(line, '\t');
    if (fields.size() != 7) {
      Throw(ErrorCode::kCorruptDataset, "bad manifest line: " + line);
    }
    UtteranceRecord rec;
    rec.id = fields[0];
    rec.split = fields[1];
    rec.domain = fields[2];
    rec.contains_oov = fields[3] == "1";
    if (fields[3] != "0" && fields[3] != "1") {
      Throw(ErrorCode::kCorruptDataset, "bad contains_oov flag");
    }
    {
      std::istringstream ws(fields[4]);
      std::string w;
      while (ws >> w) rec.words.push_back(w);
    }
    std::uint64_t offset = 0, length = 0;
    try {
      offset = std::stoull(fields[5]);
      length = std::stoull(fields[6]);
    } catch (const std::exception&) {
      Throw(ErrorCode::kCorruptDataset, "bad offset/length in manifest");
    }

    blob.clear();
    blob.seekg(static_cast<std::streamoff>(offset));
    const std::uint32_t T = GetU32(blob);
    const std::uint32_t d = GetU32(blob);
    if (8 + static_cast<std::uint64_t>(T) * d * 4 != length) {
      Throw(ErrorCode::kCorruptDataset,
            "record length mismatch for " + rec.id);
    }
    rec.features = FloatMat(T, d);
    for (float& v : rec.features.data) {
      const std::uint32_t bits = GetU32(blob);
      std::memcpy(&v, &bits, 4);
    }

    rec.tokens = ds.lexicon.SentenceTokens(rec.words);
    bool has_oov = false;
    for (const auto& w : rec.words) has_oov = has_oov || ds.lexicon.IsOov(w);
    if (has_oov != rec.contains_oov) {
      Throw(ErrorCode::kCorruptDataset,
            "contains_oov flag does not match the words of " + rec.id);
    }
    ds.records.push_back(std::move(rec));
  }
  if (ds.records.size() != count) {
    Throw(ErrorCode::kCorruptDataset,
          "manifest and feature blob disagree on the record count");
  }
  return ds;
}

}  // namespace octl
