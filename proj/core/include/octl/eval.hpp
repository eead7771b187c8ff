// core/include/octl/eval.hpp

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

#ifndef OCTL_EVAL_HPP_
#define OCTL_EVAL_HPP_

#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "octl/corpus.hpp"
#include "octl/model.hpp"

namespace octl {

struct EditCounts {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  double wer = 0.0;  // percent; can exceed 100
};

// Word-level Levenshtein alignment with unit costs.  Cost ties during the
// backtrace prefer substitution, then deletion, then insertion, so the
// breakdown is deterministic.  Throws EmptyReference on an empty ref.
EditCounts WordErrorRate(const std::vector<std::string>& ref,
                         const std::vector<std::string>& hyp);

struct OovCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

// Occurrence-count matching per OOV word: tp = min(ref count, hyp count),
// the rest split into fn (missed) and fp (hallucinated).
OovCounts CountOov(const std::vector<std::string>& ref,
                   const std::vector<std::string>& hyp,
                   const std::unordered_set<std::string>& oov_words);

// 100 * tp / (tp + fn); an empty denominator counts as a perfect score,
// matching the convention that a system predicting no OOV words at all
// has precision 100.
double RecallPercent(std::size_t tp, std::size_t fn);
double PrecisionPercent(std::size_t tp, std::size_t fp);

struct EvalReport {
  std::size_t utterances = 0;
  std::size_t ref_words = 0;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  double wer = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double recall = 0.0;
  double precision = 0.0;
  std::map<std::string, OovCounts> per_word;
};

// Aggregates metrics over parallel reference/hypothesis word sequences.
EvalReport EvaluateHypotheses(
    const std::vector<std::vector<std::string>>& refs,
    const std::vector<std::vector<std::string>>& hyps,
    const std::unordered_set<std::string>& oov_words);

// Greedy-decodes every record with the model, recovers words from the
// unit stream, and aggregates.  The model must match the lexicon's
// inventory size.
EvalReport Evaluate(const ParamVector& params, const ModelConfig& cfg,
                    const Lexicon& lex,
                    const std::vector<const UtteranceRecord*>& records,
                    const std::unordered_set<std::string>& oov_words);

// Human-readable lines and a (metric, value) tab-separated table.
std::string FormatReport(const EvalReport& report);
std::string FormatReportTsv(const EvalReport& report);

}  // namespace octl

#endif  // OCTL_EVAL_HPP_
