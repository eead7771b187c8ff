// core/src/trainer.cpp

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

#include "octl/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "octl/error.hpp"
#include "octl/gradients.hpp"
#include "octl/lattice.hpp"
#include "octl/rng.hpp"

namespace octl {

std::size_t ThreadCount() {
  const char* env = std::getenv("OCTL_THREADS");
  if (env == nullptr) return 1;
  const long v = std::strtol(env, nullptr, 10);
  return v < 1 ? 1 : static_cast<std::size_t>(v);
}

namespace {

// Runs fn(0..n) on up to `threads` workers.  Callers write into
// preallocated slots and reduce in index order afterwards, which keeps
// results identical for any thread count.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t threads = std::min(ThreadCount(), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&]() {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

std::vector<WordSpan> SpansFor(const UtteranceRecord& rec, const Lexicon& lex) {
  std::vector<WordSpan> spans;
  spans.reserve(rec.words.size());
  std::size_t pos = 0;
  for (const auto& w : rec.words) {
    const std::size_t len = lex.Tokens(w).size();
    spans.push_back(WordSpan{w, pos, pos + len});
    pos += len;
  }
  return spans;
}

UtteranceEval UtteranceGradient(const ParamVector& params,
                                const ModelConfig& cfg, const Lexicon& lex,
                                const UtteranceRecord& rec,
                                const FloatMat& features,
                                const RescaleConfig* rescale) {
  ExtendedLabels ext = ExtendLabels(rec.tokens, lex.inventory());
  if (rescale != nullptr && rescale->level == RescaleLevel::kWord) {
    const std::vector<WordSpan> spans = SpansFor(rec, lex);
    ext = MarkOovNodes(std::move(ext), spans, *rescale);
  }
  const Mat logits = ModelForward(params, features, cfg);
  const LossGradient lg =
      LogitsGradient(ext, logits, rescale, rec.contains_oov);
  UtteranceEval out;
  out.loss = lg.loss;
  out.grad = ModelBackward(params, features, lg.d_logits, cfg);
  return out;
}

UtteranceEval UtteranceGradient(const ParamVector& params,
                                const ModelConfig& cfg, const Lexicon& lex,
                                const UtteranceRecord& rec,
                                const RescaleConfig* rescale) {
  return UtteranceGradient(params, cfg, lex, rec, rec.features, rescale);
}

double MeanLoss(const ParamVector& params, const ModelConfig& cfg,
                const Lexicon& lex,
                const std::vector<const UtteranceRecord*>& records) {
  if (records.empty()) {
    Throw(ErrorCode::kEmptyDataset, "no validation utterances");
  }
  std::vector<double> losses(records.size(), 0.0);
  ParallelFor(records.size(), [&](std::size_t i) {
    const UtteranceRecord& rec = *records[i];
    const ExtendedLabels ext = ExtendLabels(rec.tokens, lex.inventory());
    const Mat logits = ModelForward(params, rec.features, cfg);
    const FramePosteriors post = FramePosteriors::Raw(SoftmaxColumns(logits));
    losses[i] = CtcLoss(ext, post);
  });
  double sum = 0.0;
  for (const double l : losses) sum += l;
  return sum / static_cast<double>(records.size());
}

std::vector<const UtteranceRecord*> MixedValidation(const Dataset& data) {
  const auto target = data.Select("target", "val");
  const auto source = data.Select("source", "val");
  std::vector<const UtteranceRecord*> out = target;
  const std::size_t take = std::min(source.size(), target.size());
  out.insert(out.end(), source.begin(), source.begin() + take);
  return out;
}

namespace {

// Shuffled epoch cursor: every pool entry appears once per epoch, order
// redrawn from the training generator at each wrap.
class Cursor {
 public:
  explicit Cursor(std::size_t n) : order_(n), pos_(n) {
    for (std::size_t i = 0; i < n; ++i) order_[i] = i;
  }

  std::size_t Next(Rng& rng) {
    if (pos_ >= order_.size()) {
      for (std::size_t i = order_.size(); i > 1; --i) {
        const std::size_t j = rng.UniformInt(i);
        std::swap(order_[i - 1], order_[j]);
      }
      pos_ = 0;
    }
    return order_[pos_++];
  }

 private:
  std::vector<std::size_t> order_;
  std::size_t pos_;
};

TrainResult RunLoop(ParamVector params, const ModelConfig& mcfg,
                    const TrainConfig& tcfg,
                    const std::vector<const UtteranceRecord*>& source_pool,
                    const std::vector<const UtteranceRecord*>& target_pool,
                    const std::vector<const UtteranceRecord*>& val,
                    const Lexicon& lex, const FinetuneOptions& opts,
                    const ParamVector& anchor) {
  const std::size_t target_n = TargetPerBatch(tcfg);
  const std::size_t source_n = tcfg.batch_size - target_n;
  if (source_n > 0 && source_pool.empty()) {
    Throw(ErrorCode::kEmptyDataset, "mix ratio needs source utterances");
  }
  if (target_n > 0 && target_pool.empty()) {
    Throw(ErrorCode::kEmptyDataset, "mix ratio needs target utterances");
  }
  if (opts.reg == Regularizer::kEwc && opts.fisher == nullptr) {
    Throw(ErrorCode::kConfigError, "ewc regularizer needs a fisher snapshot");
  }
  const RescaleConfig* rescale =
      opts.rescale.mu == 1.0 && opts.rescale.level == RescaleLevel::kSentence
          ? nullptr
          : &opts.rescale;

  Rng rng(tcfg.seed);
  Cursor source_cur(source_pool.size());
  Cursor target_cur(target_pool.size());

  TrainResult result;
  const double v0 = MeanLoss(params, mcfg, lex, val);
  result.trace.push_back(ValidationPoint{0, v0});
  result.best =
      Checkpoint{mcfg, params, 0, v0, rng.SaveState()};

  std::vector<const UtteranceRecord*> batch(tcfg.batch_size, nullptr);
  std::vector<FloatMat> feats(tcfg.batch_size);
  std::vector<UtteranceEval> evals(tcfg.batch_size);
  std::size_t bad_rounds = 0;

  for (std::size_t step = 0; step < tcfg.max_steps; ++step) {
    for (std::size_t i = 0; i < source_n; ++i) {
      batch[i] = source_pool[source_cur.Next(rng)];
    }
    for (std::size_t i = 0; i < target_n; ++i) {
      batch[source_n + i] = target_pool[target_cur.Next(rng)];
    }
    // Mask draws happen on the single training generator before the
    // (possibly concurrent) evaluations.
    for (std::size_t i = 0; i < tcfg.batch_size; ++i) {
      feats[i] = batch[i]->features;
      if (opts.mask_augment) MaskAugment(feats[i], rng, opts.mask_max_width);
    }
    ParallelFor(tcfg.batch_size, [&](std::size_t i) {
      evals[i] = UtteranceGradient(params, mcfg, lex, *batch[i], feats[i],
                                   rescale);
    });

    ParamVector grad(params.layout);
    for (std::size_t i = 0; i < tcfg.batch_size; ++i) {
      const auto& g = evals[i].grad.values;
      for (std::size_t k = 0; k < grad.values.size(); ++k) {
        grad.values[k] += g[k];
      }
    }
    const double inv_batch = 1.0 / static_cast<double>(tcfg.batch_size);
    for (double& g : grad.values) g *= inv_batch;

    if (opts.reg == Regularizer::kL2) {
      const Penalty p = L2Penalty(params, anchor, opts.lambda);
      for (std::size_t k = 0; k < grad.values.size(); ++k) {
        grad.values[k] += p.gradient[k];
      }
    } else if (opts.reg == Regularizer::kEwc) {
      const Penalty p = EwcPenalty(params, *opts.fisher, opts.lambda);
      for (std::size_t k = 0; k < grad.values.size(); ++k) {
        grad.values[k] += p.gradient[k];
      }
    }

    SgdStep(params, std::move(grad), step, tcfg);
    result.steps_run = step + 1;

    if ((step + 1) % tcfg.validate_every_steps == 0) {
      const double vloss = MeanLoss(params, mcfg, lex, val);
      result.trace.push_back(ValidationPoint{step + 1, vloss});
      if (vloss < result.best.validation_loss) {
        result.best =
            Checkpoint{mcfg, params, step + 1, vloss, rng.SaveState()};
        bad_rounds = 0;
      } else if (++bad_rounds >= tcfg.patience) {
        break;
      }
    }
  }
  return result;
}

}  // namespace

TrainResult TrainBase(const Dataset& data, const ModelConfig& mcfg,
                      const TrainConfig& tcfg) {
  TrainConfig cfg = tcfg;
  cfg.mix_source = 1;
  cfg.mix_target = 0;
  FinetuneOptions opts;  // plain objective, no regularizer
  const ParamVector params = InitParams(mcfg);
  return RunLoop(params, mcfg, cfg, data.Select("source", "train"), {},
                 data.Select("source", "val"), data.lexicon, opts, params);
}

TrainResult Finetune(const Checkpoint& base, const Dataset& data,
                     const TrainConfig& tcfg, const FinetuneOptions& opts) {
  FinetuneOptions o = opts;
  if (o.rescale.oov_words.empty()) {
    o.rescale.oov_words = data.lexicon.oov_words();
  }
  const ParamVector& anchor =
      o.fisher != nullptr ? o.fisher->anchor : base.params;
  return RunLoop(base.params, base.model, tcfg,
                 data.Select("source", "train"), data.Select("target", "train"),
                 MixedValidation(data), data.lexicon, o, anchor);
}

FisherSnapshot EstimateFisherOnCorpus(
    const ParamVector& anchor, const ModelConfig& cfg, const Lexicon& lex,
    const std::vector<const UtteranceRecord*>& records) {
  if (records.empty()) {
    Throw(ErrorCode::kEmptyDataset, "fisher estimation needs utterances");
  }
  return EstimateFisher(
      anchor,
      [&](std::size_t i) {
        return UtteranceGradient(anchor, cfg, lex, *records[i], nullptr)
            .grad.values;
      },
      records.size());
}

}  // namespace octl
