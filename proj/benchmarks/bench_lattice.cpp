// benchmarks/bench_lattice.cpp

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

#include <cmath>
#include <vector>

#include "octl/gradients.hpp"
#include "octl/lattice.hpp"
#include "octl/rng.hpp"

namespace {

using namespace octl;

TokenInventory Inventory(int num_units) {
  std::vector<std::string> names;
  for (int i = 0; i + 1 < num_units; ++i) {
    names.push_back("u" + std::to_string(i));
  }
  names.push_back("<blank>");
  return TokenInventory(names, num_units - 1);
}

FramePosteriors Posteriors(int n, int t, Rng& rng) {
  Mat m(n, t);
  for (int j = 0; j < t; ++j) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      m(i, j) = std::exp(rng.Uniform(-2.0, 2.0));
      sum += m(i, j);
    }
    for (int i = 0; i < n; ++i) m(i, j) /= sum;
  }
  return FramePosteriors::Raw(std::move(m));
}

std::vector<int> Target(int n, int u, Rng& rng) {
  std::vector<int> y(u);
  for (int i = 0; i < u; ++i) {
    y[i] = static_cast<int>(rng.UniformInt(n - 1));
  }
  return y;
}

// Utterance-sized instance: 73 units, 40 frames, 12 target tokens.
void BM_LatticeCompute(benchmark::State& state) {
  Rng rng(1);
  const int n = static_cast<int>(state.range(0));
  const int t = static_cast<int>(state.range(1));
  const int u = static_cast<int>(state.range(2));
  const TokenInventory inv = Inventory(n);
  const auto post = Posteriors(n, t, rng);
  ExtendedLabels ext = ExtendLabels(Target(n, u, rng), inv);
  while (ext.min_frames() > t) {
    ext = ExtendLabels(Target(n, u, rng), inv);
  }
  for (auto _ : state) {
    const Lattice lat = Lattice::Compute(ext, post);
    benchmark::DoNotOptimize(lat.log_total);
  }
}
BENCHMARK(BM_LatticeCompute)
    ->Args({8, 20, 5})
    ->Args({73, 40, 12})
    ->Args({73, 120, 30});

void BM_CtcLoss(benchmark::State& state) {
  Rng rng(2);
  const TokenInventory inv = Inventory(73);
  const auto post = Posteriors(73, 40, rng);
  const ExtendedLabels ext = ExtendLabels(Target(73, 12, rng), inv);
  for (auto _ : state) {
    benchmark::DoNotOptimize(CtcLoss(ext, post));
  }
}
BENCHMARK(BM_CtcLoss);

void BM_LogitsGradient(benchmark::State& state) {
  Rng rng(3);
  const TokenInventory inv = Inventory(73);
  Mat logits(73, 40);
  for (auto& v : logits.data) v = rng.Uniform(-2.0, 2.0);
  const ExtendedLabels ext = ExtendLabels(Target(73, 12, rng), inv);
  for (auto _ : state) {
    const LossGradient lg = LogitsGradient(ext, logits);
    benchmark::DoNotOptimize(lg.loss);
  }
}
BENCHMARK(BM_LogitsGradient);

void BM_GreedyDecode(benchmark::State& state) {
  Rng rng(4);
  const TokenInventory inv = Inventory(73);
  const auto post = Posteriors(73, 40, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(GreedyDecode(post, inv));
  }
}
BENCHMARK(BM_GreedyDecode);

}  // namespace

BENCHMARK_MAIN();
