// core/include/octl/config.hpp

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

#ifndef OCTL_CONFIG_HPP_
#define OCTL_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "octl/corpus.hpp"
#include "octl/model.hpp"
#include "octl/rescale.hpp"
#include "octl/trainer.hpp"

namespace octl {

// Everything an experiment run needs, readable from a key=value file with
// [section] headers and overridable one key at a time from the command
// line.  Unknown keys and malformed values throw ConfigError.

struct ExperimentConfig {
  ModelConfig model;
  TrainConfig train;
  RescaleConfig rescale;
  SyntheticSpec corpus;
  SplitSizes sizes;
  std::size_t invocab_words = 40;
  std::size_t oov_words = 10;

  Regularizer reg = Regularizer::kNone;
  double lambda = 1e7;
  bool mask_augment = true;
  std::size_t mask_max_width = 3;

  std::vector<double> mu_grid = {1, 10, 100, 1000, 10000};
  std::vector<double> lambda_grid = {1e7, 5e7};
  std::vector<std::pair<std::size_t, std::size_t>> mix_grid = {
      {0, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}};

  std::string data_dir = "data";
  std::string run_dir = "runs";
  std::uint64_t seed = 1;
};

// Applies one dotted key ("train.lr_initial", "rescale.mu", plain "seed")
// to the config.  The file parser and the flag overrides both land here.
void ApplyKey(ExperimentConfig& cfg, const std::string& key,
              const std::string& value);

// Parses the file format: comments (#), blank lines, [section] headers,
// key=value pairs.  Throws IoError when unreadable.
ExperimentConfig ParseConfigFile(const std::string& path);
ExperimentConfig ParseConfigText(const std::string& text);

// Full dump in the file format; reparsing reproduces the config.
std::string FormatConfig(const ExperimentConfig& cfg);

// Fills the derived per-module seeds from the master seed (unless set
// explicitly) and mirrors the corpus feature width into the model config.
void FinalizeConfig(ExperimentConfig& cfg);

}  // namespace octl

#endif  // OCTL_CONFIG_HPP_
