// tests/test_config.cpp

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>

#include "doctest.h"
#include "octl/config.hpp"
#include "octl/error.hpp"

using namespace octl;

TEST_CASE("defaults mirror the sweep tables") {
  ExperimentConfig cfg;
  CHECK(cfg.mu_grid == std::vector<double>{1, 10, 100, 1000, 10000});
  CHECK(cfg.lambda_grid == std::vector<double>{1e7, 5e7});
  REQUIRE(cfg.mix_grid.size() == 5);
  CHECK(cfg.mix_grid.front() == std::pair<std::size_t, std::size_t>{0, 1});
  CHECK(cfg.mix_grid.back() == std::pair<std::size_t, std::size_t>{4, 1});
  CHECK(cfg.train.batch_size == 20);
  CHECK(cfg.train.grad_clip_norm == 2.0);
  CHECK(cfg.train.anneal_factor == 1.1);
  CHECK(cfg.train.anneal_every_steps == 3000);
  CHECK(cfg.invocab_words == 40);
  CHECK(cfg.oov_words == 10);
}

TEST_CASE("file text parses with sections and comments") {
  const std::string text = R"(# experiment
seed = 7

[train]
batch_size = 10
mix_ratio = 3:1
lr_initial = 0.005

[rescale]
mu = 100
level = word
blank_policy = labels_only

[reg]
kind = ewc
lambda = 5e7
)";
  const ExperimentConfig cfg = ParseConfigText(text);
  CHECK(cfg.seed == 7);
  CHECK(cfg.train.batch_size == 10);
  CHECK(cfg.train.mix_source == 3);
  CHECK(cfg.train.mix_target == 1);
  CHECK(cfg.train.lr_initial == 0.005);
  CHECK(cfg.rescale.mu == 100.0);
  CHECK(cfg.rescale.level == RescaleLevel::kWord);
  CHECK(cfg.rescale.blank_policy == BlankPolicy::kLabelsOnly);
  CHECK(cfg.reg == Regularizer::kEwc);
  CHECK(cfg.lambda == 5e7);
}

TEST_CASE("bad input is rejected with ConfigError") {
  CHECK_THROWS_WITH_AS(ParseConfigText("nonsense\n"),
                       doctest::Contains("ConfigError"), Error);
  CHECK_THROWS_WITH_AS(ParseConfigText("unknown_key = 3\n"),
                       doctest::Contains("ConfigError"), Error);
  CHECK_THROWS_WITH_AS(ParseConfigText("[train]\nbatch_size = pony\n"),
                       doctest::Contains("ConfigError"), Error);
  CHECK_THROWS_WITH_AS(ParseConfigText("[rescale]\nmu = -4\n"),
                       doctest::Contains("ConfigError"), Error);
  CHECK_THROWS_WITH_AS(ParseConfigText("[train]\nmix_ratio = 0:0\n"),
                       doctest::Contains("ConfigError"), Error);
  CHECK_THROWS_WITH_AS(ParseConfigText("[oops\nx = 1\n"),
                       doctest::Contains("ConfigError"), Error);
}

TEST_CASE("overrides replace file values") {
  ExperimentConfig cfg = ParseConfigText("[rescale]\nmu = 10\n");
  CHECK(cfg.rescale.mu == 10.0);
  ApplyKey(cfg, "rescale.mu", "1000");
  CHECK(cfg.rescale.mu == 1000.0);
  ApplyKey(cfg, "sweep.mix_grid", "0:1, 2:1");
  REQUIRE(cfg.mix_grid.size() == 2);
  CHECK(cfg.mix_grid[1] == std::pair<std::size_t, std::size_t>{2, 1});
}

TEST_CASE("format and reparse round-trips") {
  ExperimentConfig cfg;
  cfg.seed = 99;
  cfg.train.mix_source = 4;
  cfg.rescale.level = RescaleLevel::kWord;
  cfg.rescale.mu = 12.5;
  cfg.reg = Regularizer::kL2;
  cfg.lambda = 5e7;
  cfg.corpus.noise_sigma = 0.125;
  cfg.mu_grid = {1, 100};
  cfg.data_dir = "elsewhere";
  const ExperimentConfig back = ParseConfigText(FormatConfig(cfg));
  CHECK(back.seed == 99);
  CHECK(back.train.mix_source == 4);
  CHECK(back.rescale.level == RescaleLevel::kWord);
  CHECK(back.rescale.mu == 12.5);
  CHECK(back.reg == Regularizer::kL2);
  CHECK(back.lambda == 5e7);
  CHECK(back.corpus.noise_sigma == 0.125);
  CHECK(back.mu_grid == cfg.mu_grid);
  CHECK(back.data_dir == "elsewhere");
  CHECK(FormatConfig(back) == FormatConfig(cfg));
}

TEST_CASE("finalize derives seeds and mirrors the feature width") {
  ExperimentConfig cfg;
  cfg.seed = 5;
  cfg.corpus.feature_dim = 24;
  FinalizeConfig(cfg);
  CHECK(cfg.model.feature_dim == 24);
  CHECK(cfg.corpus.seed == 5);
  CHECK(cfg.model.seed != 0);
  CHECK(cfg.train.seed != 0);
  CHECK(cfg.model.seed != cfg.train.seed);

  ExperimentConfig pinned;
  pinned.seed = 5;
  pinned.model.seed = 77;
  FinalizeConfig(pinned);
  CHECK(pinned.model.seed == 77);
}
