// core/include/octl/trainer.hpp

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

#ifndef OCTL_TRAINER_HPP_
#define OCTL_TRAINER_HPP_

#include <cstddef>
#include <vector>

#include "octl/corpus.hpp"
#include "octl/model.hpp"
#include "octl/regularizers.hpp"
#include "octl/rescale.hpp"

namespace octl {

enum class Regularizer {
  kNone,
  kL2,
  kEwc,
};

struct FinetuneOptions {
  RescaleConfig rescale;
  Regularizer reg = Regularizer::kNone;
  double lambda = 0.0;
  // Anchor for L2 and EWC; EWC additionally needs the snapshot.  Both
  // default to the base checkpoint's parameters when null.
  const FisherSnapshot* fisher = nullptr;
  bool mask_augment = true;
  std::size_t mask_max_width = 3;
};

struct UtteranceEval {
  double loss = 0.0;  // monitored loss; unrescaled under word-level configs
  ParamVector grad;
};

// Loss and parameter gradient for one utterance at the given parameters.
// A null rescale config gives the plain objective.  The features override
// exists so training can pass a masked copy.
UtteranceEval UtteranceGradient(const ParamVector& params,
                                const ModelConfig& cfg, const Lexicon& lex,
                                const UtteranceRecord& rec,
                                const FloatMat& features,
                                const RescaleConfig* rescale);
UtteranceEval UtteranceGradient(const ParamVector& params,
                                const ModelConfig& cfg, const Lexicon& lex,
                                const UtteranceRecord& rec,
                                const RescaleConfig* rescale);

// Token index range of every word in the record, for OOV node marking.
std::vector<WordSpan> SpansFor(const UtteranceRecord& rec, const Lexicon& lex);

// Mean plain objective over the given records.  Rescaling is deliberately
// absent here so validation losses stay comparable across mu.
double MeanLoss(const ParamVector& params, const ModelConfig& cfg,
                const Lexicon& lex,
                const std::vector<const UtteranceRecord*>& records);

// All target validation utterances plus equally many source validation
// utterances, in dataset order: the 1:1 mixed early-stopping set.
std::vector<const UtteranceRecord*> MixedValidation(const Dataset& data);

struct ValidationPoint {
  std::size_t step = 0;  // updates applied before this measurement
  double loss = 0.0;
};

struct TrainResult {
  Checkpoint best;
  std::vector<ValidationPoint> trace;
  std::size_t steps_run = 0;
};

// Base training on the source domain: plain objective, no regularizer,
// validation on the source validation split.
TrainResult TrainBase(const Dataset& data, const ModelConfig& mcfg,
                      const TrainConfig& tcfg);

// Mixed-batch fine-tuning from a base checkpoint.  Batches hold
// TargetPerBatch target utterances and source for the remainder, drawn
// from per-pool shuffled epoch cursors; gradients are batch means plus
// the regularizer gradient; early stopping watches the 1:1 mixed
// validation loss with the configured patience.
TrainResult Finetune(const Checkpoint& base, const Dataset& data,
                     const TrainConfig& tcfg, const FinetuneOptions& opts);

// Fisher diagonal at the anchor from per-utterance plain-loss gradients,
// accumulated in record order.
FisherSnapshot EstimateFisherOnCorpus(
    const ParamVector& anchor, const ModelConfig& cfg, const Lexicon& lex,
    const std::vector<const UtteranceRecord*>& records);

// OCTL_THREADS (default 1): worker threads for per-utterance evaluation.
// Reductions stay in utterance order, so the count never changes results.
std::size_t ThreadCount();

}  // namespace octl

#endif  // OCTL_TRAINER_HPP_
