// benchmarks/bench_model.cpp

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

#include <benchmark/benchmark.h>

#include "octl/corpus.hpp"
#include "octl/model.hpp"
#include "octl/rng.hpp"
#include "octl/trainer.hpp"

namespace {

using namespace octl;

struct Fixture {
  Dataset data;
  ModelConfig cfg;
  ParamVector params;
  const UtteranceRecord* rec;

  Fixture()
      : data([] {
          SyntheticSpec spec;
          spec.seed = 5;
          const Lexicon lex = Lexicon::Generate(12, 4, 5);
          SplitSizes sizes;
          sizes.source_train = 30;
          sizes.source_val = 6;
          sizes.target_total = 10;
          sizes.oov_test = 4;
          sizes.invocab_test = 4;
          sizes.target_support = 5;
          return BuildSplits(lex, spec, sizes);
        }()) {
    cfg.feature_dim = 16;
    cfg.context_window = 1;
    cfg.hidden_size = 32;
    cfg.num_units = static_cast<std::size_t>(data.lexicon.inventory().size());
    cfg.seed = 9;
    params = InitParams(cfg);
    rec = data.Select("source", "train")[0];
  }
};

Fixture& Fix() {
  static Fixture f;
  return f;
}

void BM_ModelForward(benchmark::State& state) {
  auto& f = Fix();
  for (auto _ : state) {
    const Mat logits = ModelForward(f.params, f.rec->features, f.cfg);
    benchmark::DoNotOptimize(logits.data.data());
  }
}
BENCHMARK(BM_ModelForward);

void BM_UtteranceGradient(benchmark::State& state) {
  auto& f = Fix();
  for (auto _ : state) {
    const auto ev =
        UtteranceGradient(f.params, f.cfg, f.data.lexicon, *f.rec, nullptr);
    benchmark::DoNotOptimize(ev.loss);
  }
}
BENCHMARK(BM_UtteranceGradient);

void BM_TrainStep(benchmark::State& state) {
  auto& f = Fix();
  TrainConfig tcfg;
  tcfg.batch_size = 20;
  tcfg.max_steps = 1;
  tcfg.validate_every_steps = 1000000;  // no validation inside the loop
  tcfg.mix_source = 1;
  tcfg.mix_target = 0;
  for (auto _ : state) {
    // One optimizer step end to end, including batch assembly and masking.
    Checkpoint base;
    base.model = f.cfg;
    base.params = f.params;
    FinetuneOptions opts;
    const TrainResult r = Finetune(base, f.data, tcfg, opts);
    benchmark::DoNotOptimize(r.steps_run);
  }
}
BENCHMARK(BM_TrainStep);

}  // namespace

BENCHMARK_MAIN();
