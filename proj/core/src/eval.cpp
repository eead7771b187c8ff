// core/src/eval.cpp

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

#include "octl/eval.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "octl/error.hpp"
#include "octl/lattice.hpp"

namespace octl {

EditCounts WordErrorRate(const std::vector<std::string>& ref,
                         const std::vector<std::string>& hyp) {
  if (ref.empty()) {
    Throw(ErrorCode::kEmptyReference, "reference transcript has no words");
  }
  const std::size_t nr = ref.size();
  const std::size_t nh = hyp.size();
  std::vector<std::size_t> dist((nr + 1) * (nh + 1), 0);
  auto d = [&](std::size_t i, std::size_t j) -> std::size_t& {
    return dist[i * (nh + 1) + j];
  };
  for (std::size_t i = 0; i <= nr; ++i) d(i, 0) = i;
  for (std::size_t j = 0; j <= nh; ++j) d(0, j) = j;
  for (std::size_t i = 1; i <= nr; ++i) {
    for (std::size_t j = 1; j <= nh; ++j) {
      const std::size_t sub = d(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      const std::size_t del = d(i - 1, j) + 1;
      const std::size_t ins = d(i, j - 1) + 1;
      d(i, j) = std::min({sub, del, ins});
    }
  }

  EditCounts out;
  std::size_t i = nr;
  std::size_t j = nh;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        d(i, j) == d(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] != hyp[j - 1]) ++out.substitutions;
      --i;
      --j;
    } else if (i > 0 && d(i, j) == d(i - 1, j) + 1) {
      ++out.deletions;
      --i;
    } else {
      ++out.insertions;
      --j;
    }
  }
  out.wer = 100.0 *
            static_cast<double>(out.substitutions + out.deletions +
                                out.insertions) /
            static_cast<double>(nr);
  return out;
}

OovCounts CountOov(const std::vector<std::string>& ref,
                   const std::vector<std::string>& hyp,
                   const std::unordered_set<std::string>& oov_words) {
  std::unordered_map<std::string, std::size_t> ref_count;
  std::unordered_map<std::string, std::size_t> hyp_count;
  for (const auto& w : ref) {
    if (oov_words.count(w)) ++ref_count[w];
  }
  for (const auto& w : hyp) {
    if (oov_words.count(w)) ++hyp_count[w];
  }
  OovCounts out;
  for (const auto& [w, n] : ref_count) {
    const auto it = hyp_count.find(w);
    const std::size_t matched = it == hyp_count.end() ? 0 : std::min(n, it->second);
    out.tp += matched;
    out.fn += n - matched;
  }
  for (const auto& [w, n] : hyp_count) {
    const auto it = ref_count.find(w);
    const std::size_t matched = it == ref_count.end() ? 0 : std::min(n, it->second);
    out.fp += n - matched;
  }
  return out;
}

double RecallPercent(std::size_t tp, std::size_t fn) {
  if (tp + fn == 0) return 100.0;
  return 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double PrecisionPercent(std::size_t tp, std::size_t fp) {
  if (tp + fp == 0) return 100.0;
  return 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fp);
}

namespace {

void AccumulatePerWord(const std::vector<std::string>& ref,
                       const std::vector<std::string>& hyp,
                       const std::unordered_set<std::string>& oov_words,
                       std::map<std::string, OovCounts>* per_word) {
  std::map<std::string, std::size_t> ref_count;
  std::map<std::string, std::size_t> hyp_count;
  for (const auto& w : ref) {
    if (oov_words.count(w)) ++ref_count[w];
  }
  for (const auto& w : hyp) {
    if (oov_words.count(w)) ++hyp_count[w];
  }
  for (const auto& [w, n] : ref_count) {
    const auto it = hyp_count.find(w);
    const std::size_t matched = it == hyp_count.end() ? 0 : std::min(n, it->second);
    auto& slot = (*per_word)[w];
    slot.tp += matched;
    slot.fn += n - matched;
  }
  for (const auto& [w, n] : hyp_count) {
    const auto it = ref_count.find(w);
    const std::size_t matched = it == ref_count.end() ? 0 : std::min(n, it->second);
    (*per_word)[w].fp += n - matched;
  }
}

}  // namespace

EvalReport EvaluateHypotheses(
    const std::vector<std::vector<std::string>>& refs,
    const std::vector<std::vector<std::string>>& hyps,
    const std::unordered_set<std::string>& oov_words) {
  if (refs.size() != hyps.size()) {
    Throw(ErrorCode::kShapeMismatch, "reference/hypothesis count mismatch");
  }
  EvalReport report;
  report.utterances = refs.size();
  std::size_t edits = 0;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const EditCounts ec = WordErrorRate(refs[i], hyps[i]);
    report.ref_words += refs[i].size();
    report.substitutions += ec.substitutions;
    report.deletions += ec.deletions;
    report.insertions += ec.insertions;
    edits += ec.substitutions + ec.deletions + ec.insertions;
    const OovCounts oc = CountOov(refs[i], hyps[i], oov_words);
    report.tp += oc.tp;
    report.fp += oc.fp;
    report.fn += oc.fn;
    AccumulatePerWord(refs[i], hyps[i], oov_words, &report.per_word);
  }
  report.wer = report.ref_words == 0
                   ? 0.0
                   : 100.0 * static_cast<double>(edits) /
                         static_cast<double>(report.ref_words);
  report.recall = RecallPercent(report.tp, report.fn);
  report.precision = PrecisionPercent(report.tp, report.fp);
  return report;
}

EvalReport Evaluate(const ParamVector& params, const ModelConfig& cfg,
                    const Lexicon& lex,
                    const std::vector<const UtteranceRecord*>& records,
                    const std::unordered_set<std::string>& oov_words) {
  if (cfg.num_units != static_cast<std::size_t>(lex.inventory().size())) {
    Throw(ErrorCode::kShapeMismatch, "model output size " +
                                         std::to_string(cfg.num_units) +
                                         " does not match inventory size " +
                                         std::to_string(lex.inventory().size()));
  }
  std::vector<std::vector<std::string>> refs;
  std::vector<std::vector<std::string>> hyps;
  refs.reserve(records.size());
  hyps.reserve(records.size());
  for (const UtteranceRecord* rec : records) {
    refs.push_back(rec->words);
    const Mat logits = ModelForward(params, rec->features, cfg);
    const std::vector<int> units = GreedyDecodeLogits(logits, lex.inventory());
    hyps.push_back(lex.Detokenize(units));
  }
  return EvaluateHypotheses(refs, hyps, oov_words);
}

namespace {

std::string Percent(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << v;
  return os.str();
}

}  // namespace

std::string FormatReport(const EvalReport& report) {
  std::ostringstream os;
  os << "utterances " << report.utterances << ", reference words "
     << report.ref_words << "\n";
  os << "WER " << Percent(report.wer) << "% (sub " << report.substitutions
     << ", del " << report.deletions << ", ins " << report.insertions << ")\n";
  os << "OOV tp " << report.tp << ", fp " << report.fp << ", fn " << report.fn
     << "\n";
  os << "OOV recall " << Percent(report.recall) << "%, precision "
     << Percent(report.precision) << "%\n";
  for (const auto& [word, c] : report.per_word) {
    os << "  " << word << ": tp " << c.tp << ", fp " << c.fp << ", fn " << c.fn
       << "\n";
  }
  return os.str();
}

std::string FormatReportTsv(const EvalReport& report) {
  std::ostringstream os;
  os << "utterances\t" << report.utterances << "\n";
  os << "ref_words\t" << report.ref_words << "\n";
  os << "wer\t" << Percent(report.wer) << "\n";
  os << "substitutions\t" << report.substitutions << "\n";
  os << "deletions\t" << report.deletions << "\n";
  os << "insertions\t" << report.insertions << "\n";
  os << "oov_tp\t" << report.tp << "\n";
  os << "oov_fp\t" << report.fp << "\n";
  os << "oov_fn\t" << report.fn << "\n";
  os << "oov_recall\t" << Percent(report.recall) << "\n";
  os << "oov_precision\t" << Percent(report.precision) << "\n";
  return os.str();
}

}  // namespace octl
