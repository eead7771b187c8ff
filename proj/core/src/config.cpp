// core/src/config.cpp

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

#include "octl/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "octl/error.hpp"
#include "octl/rng.hpp"

namespace octl {

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void BadValue(const std::string& key, const std::string& value) {
  Throw(ErrorCode::kConfigError,
        "bad value '" + value + "' for key '" + key + "'");
}

std::uint64_t ParseU64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(value, &used);
    if (used != value.size()) BadValue(key, value);
    return v;
  } catch (const Error&) {
    throw;
  } catch (...) {
    BadValue(key, value);
  }
}

std::size_t ParseSize(const std::string& key, const std::string& value) {
  return static_cast<std::size_t>(ParseU64(key, value));
}

double ParseDouble(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) BadValue(key, value);
    return v;
  } catch (const Error&) {
    throw;
  } catch (...) {
    BadValue(key, value);
  }
}

bool ParseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  BadValue(key, value);
}

std::pair<std::size_t, std::size_t> ParseMix(const std::string& key,
                                             const std::string& value) {
  const auto colon = value.find(':');
  if (colon == std::string::npos) BadValue(key, value);
  const auto s = ParseSize(key, Trim(value.substr(0, colon)));
  const auto t = ParseSize(key, Trim(value.substr(colon + 1)));
  if (s + t == 0) BadValue(key, value);
  return {s, t};
}

std::vector<std::string> SplitCommas(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = Trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

std::string LevelName(RescaleLevel level) {
  return level == RescaleLevel::kSentence ? "sentence" : "word";
}

std::string PolicyName(BlankPolicy policy) {
  switch (policy) {
    case BlankPolicy::kLabelsOnly:
      return "labels_only";
    case BlankPolicy::kLabelsPlusInteriorBlanks:
      return "labels_plus_interior_blanks";
    case BlankPolicy::kLabelsInteriorAndTrailingBlank:
      return "labels_interior_and_trailing_blank";
  }
  return "labels_interior_and_trailing_blank";
}

std::string RegName(Regularizer reg) {
  switch (reg) {
    case Regularizer::kNone:
      return "none";
    case Regularizer::kL2:
      return "l2";
    case Regularizer::kEwc:
      return "ewc";
  }
  return "none";
}

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void ApplyKey(ExperimentConfig& cfg, const std::string& key,
              const std::string& value) {
  if (key == "seed") {
    cfg.seed = ParseU64(key, value);
  } else if (key == "model.context_window") {
    cfg.model.context_window = ParseSize(key, value);
  } else if (key == "model.hidden_size") {
    cfg.model.hidden_size = ParseSize(key, value);
  } else if (key == "model.seed") {
    cfg.model.seed = ParseU64(key, value);
  } else if (key == "train.batch_size") {
    cfg.train.batch_size = ParseSize(key, value);
  } else if (key == "train.lr_initial") {
    cfg.train.lr_initial = ParseDouble(key, value);
  } else if (key == "train.anneal_factor") {
    cfg.train.anneal_factor = ParseDouble(key, value);
  } else if (key == "train.anneal_every_steps") {
    cfg.train.anneal_every_steps = ParseSize(key, value);
  } else if (key == "train.grad_clip_norm") {
    cfg.train.grad_clip_norm = ParseDouble(key, value);
  } else if (key == "train.mix_ratio") {
    const auto mix = ParseMix(key, value);
    cfg.train.mix_source = mix.first;
    cfg.train.mix_target = mix.second;
  } else if (key == "train.max_steps") {
    cfg.train.max_steps = ParseSize(key, value);
  } else if (key == "train.patience") {
    cfg.train.patience = ParseSize(key, value);
  } else if (key == "train.validate_every_steps") {
    cfg.train.validate_every_steps = ParseSize(key, value);
  } else if (key == "train.seed") {
    cfg.train.seed = ParseU64(key, value);
  } else if (key == "train.mask_augment") {
    cfg.mask_augment = ParseBool(key, value);
  } else if (key == "train.mask_max_width") {
    cfg.mask_max_width = ParseSize(key, value);
  } else if (key == "rescale.mu") {
    cfg.rescale.mu = ParseDouble(key, value);
    if (cfg.rescale.mu <= 0.0) BadValue(key, value);
  } else if (key == "rescale.level") {
    if (value == "sentence") {
      cfg.rescale.level = RescaleLevel::kSentence;
    } else if (value == "word") {
      cfg.rescale.level = RescaleLevel::kWord;
    } else {
      BadValue(key, value);
    }
  } else if (key == "rescale.blank_policy") {
    if (value == "labels_only") {
      cfg.rescale.blank_policy = BlankPolicy::kLabelsOnly;
    } else if (value == "labels_plus_interior_blanks") {
      cfg.rescale.blank_policy = BlankPolicy::kLabelsPlusInteriorBlanks;
    } else if (value == "labels_interior_and_trailing_blank") {
      cfg.rescale.blank_policy = BlankPolicy::kLabelsInteriorAndTrailingBlank;
    } else {
      BadValue(key, value);
    }
  } else if (key == "corpus.feature_dim") {
    cfg.corpus.feature_dim = ParseSize(key, value);
  } else if (key == "corpus.frames_lo") {
    cfg.corpus.frames_lo = ParseSize(key, value);
  } else if (key == "corpus.frames_hi") {
    cfg.corpus.frames_hi = ParseSize(key, value);
  } else if (key == "corpus.silence_lo") {
    cfg.corpus.silence_lo = ParseSize(key, value);
  } else if (key == "corpus.silence_hi") {
    cfg.corpus.silence_hi = ParseSize(key, value);
  } else if (key == "corpus.noise_sigma") {
    cfg.corpus.noise_sigma = ParseDouble(key, value);
  } else if (key == "corpus.seed") {
    cfg.corpus.seed = ParseU64(key, value);
  } else if (key == "corpus.invocab_words") {
    cfg.invocab_words = ParseSize(key, value);
  } else if (key == "corpus.oov_words") {
    cfg.oov_words = ParseSize(key, value);
  } else if (key == "sizes.source_train") {
    cfg.sizes.source_train = ParseSize(key, value);
  } else if (key == "sizes.source_val") {
    cfg.sizes.source_val = ParseSize(key, value);
  } else if (key == "sizes.target_total") {
    cfg.sizes.target_total = ParseSize(key, value);
  } else if (key == "sizes.oov_test") {
    cfg.sizes.oov_test = ParseSize(key, value);
  } else if (key == "sizes.invocab_test") {
    cfg.sizes.invocab_test = ParseSize(key, value);
  } else if (key == "sizes.target_support") {
    cfg.sizes.target_support = ParseSize(key, value);
  } else if (key == "reg.kind") {
    if (value == "none") {
      cfg.reg = Regularizer::kNone;
    } else if (value == "l2") {
      cfg.reg = Regularizer::kL2;
    } else if (value == "ewc") {
      cfg.reg = Regularizer::kEwc;
    } else {
      BadValue(key, value);
    }
  } else if (key == "reg.lambda") {
    cfg.lambda = ParseDouble(key, value);
    if (cfg.lambda < 0.0) BadValue(key, value);
  } else if (key == "sweep.mu_grid") {
    cfg.mu_grid.clear();
    for (const auto& item : SplitCommas(value)) {
      cfg.mu_grid.push_back(ParseDouble(key, item));
    }
    if (cfg.mu_grid.empty()) BadValue(key, value);
  } else if (key == "sweep.lambda_grid") {
    cfg.lambda_grid.clear();
    for (const auto& item : SplitCommas(value)) {
      cfg.lambda_grid.push_back(ParseDouble(key, item));
    }
    if (cfg.lambda_grid.empty()) BadValue(key, value);
  } else if (key == "sweep.mix_grid") {
    cfg.mix_grid.clear();
    for (const auto& item : SplitCommas(value)) {
      cfg.mix_grid.push_back(ParseMix(key, item));
    }
    if (cfg.mix_grid.empty()) BadValue(key, value);
  } else if (key == "paths.data_dir") {
    cfg.data_dir = value;
  } else if (key == "paths.run_dir") {
    cfg.run_dir = value;
  } else {
    Throw(ErrorCode::kConfigError, "unknown config key '" + key + "'");
  }
}

ExperimentConfig ParseConfigText(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3) {
        Throw(ErrorCode::kConfigError,
              "malformed section header at line " + std::to_string(lineno));
      }
      section = Trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      Throw(ErrorCode::kConfigError,
            "expected key=value at line " + std::to_string(lineno));
    }
    const std::string key = Trim(t.substr(0, eq));
    const std::string value = Trim(t.substr(eq + 1));
    if (key.empty()) {
      Throw(ErrorCode::kConfigError,
            "empty key at line " + std::to_string(lineno));
    }
    ApplyKey(cfg, section.empty() ? key : section + "." + key, value);
  }
  return cfg;
}

ExperimentConfig ParseConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    Throw(ErrorCode::kIoError, "cannot read config file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseConfigText(buf.str());
}

std::string FormatConfig(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "seed = " << cfg.seed << "\n\n";
  os << "[model]\n";
  os << "context_window = " << cfg.model.context_window << "\n";
  os << "hidden_size = " << cfg.model.hidden_size << "\n";
  os << "seed = " << cfg.model.seed << "\n\n";
  os << "[train]\n";
  os << "batch_size = " << cfg.train.batch_size << "\n";
  os << "lr_initial = " << FormatDouble(cfg.train.lr_initial) << "\n";
  os << "anneal_factor = " << FormatDouble(cfg.train.anneal_factor) << "\n";
  os << "anneal_every_steps = " << cfg.train.anneal_every_steps << "\n";
  os << "grad_clip_norm = " << FormatDouble(cfg.train.grad_clip_norm) << "\n";
  os << "mix_ratio = " << cfg.train.mix_source << ":" << cfg.train.mix_target
     << "\n";
  os << "max_steps = " << cfg.train.max_steps << "\n";
  os << "patience = " << cfg.train.patience << "\n";
  os << "validate_every_steps = " << cfg.train.validate_every_steps << "\n";
  os << "seed = " << cfg.train.seed << "\n";
  os << "mask_augment = " << (cfg.mask_augment ? "true" : "false") << "\n";
  os << "mask_max_width = " << cfg.mask_max_width << "\n\n";
  os << "[rescale]\n";
  os << "mu = " << FormatDouble(cfg.rescale.mu) << "\n";
  os << "level = " << LevelName(cfg.rescale.level) << "\n";
  os << "blank_policy = " << PolicyName(cfg.rescale.blank_policy) << "\n\n";
  os << "[corpus]\n";
  os << "feature_dim = " << cfg.corpus.feature_dim << "\n";
  os << "frames_lo = " << cfg.corpus.frames_lo << "\n";
  os << "frames_hi = " << cfg.corpus.frames_hi << "\n";
  os << "silence_lo = " << cfg.corpus.silence_lo << "\n";
  os << "silence_hi = " << cfg.corpus.silence_hi << "\n";
  os << "noise_sigma = " << FormatDouble(cfg.corpus.noise_sigma) << "\n";
  os << "seed = " << cfg.corpus.seed << "\n";
  os << "invocab_words = " << cfg.invocab_words << "\n";
  os << "oov_words = " << cfg.oov_words << "\n\n";
  os << "[sizes]\n";
  os << "source_train = " << cfg.sizes.source_train << "\n";
  os << "source_val = " << cfg.sizes.source_val << "\n";
  os << "target_total = " << cfg.sizes.target_total << "\n";
  os << "oov_test = " << cfg.sizes.oov_test << "\n";
  os << "invocab_test = " << cfg.sizes.invocab_test << "\n";
  os << "target_support = " << cfg.sizes.target_support << "\n\n";
  os << "[reg]\n";
  os << "kind = " << RegName(cfg.reg) << "\n";
  os << "lambda = " << FormatDouble(cfg.lambda) << "\n\n";
  os << "[sweep]\n";
  os << "mu_grid = ";
  for (std::size_t i = 0; i < cfg.mu_grid.size(); ++i) {
    os << (i ? "," : "") << FormatDouble(cfg.mu_grid[i]);
  }
  os << "\n";
  os << "lambda_grid = ";
  for (std::size_t i = 0; i < cfg.lambda_grid.size(); ++i) {
    os << (i ? "," : "") << FormatDouble(cfg.lambda_grid[i]);
  }
  os << "\n";
  os << "mix_grid = ";
  for (std::size_t i = 0; i < cfg.mix_grid.size(); ++i) {
    os << (i ? "," : "") << cfg.mix_grid[i].first << ":"
       << cfg.mix_grid[i].second;
  }
  os << "\n\n";
  os << "[paths]\n";
  os << "data_dir = " << cfg.data_dir << "\n";
  os << "run_dir = " << cfg.run_dir << "\n";
  return os.str();
}

void FinalizeConfig(ExperimentConfig& cfg) {
  cfg.model.feature_dim = cfg.corpus.feature_dim;
  if (cfg.corpus.seed == 0) cfg.corpus.seed = cfg.seed;
  if (cfg.model.seed == 0) cfg.model.seed = DeriveSeed(cfg.seed, 21);
  if (cfg.train.seed == 0) cfg.train.seed = DeriveSeed(cfg.seed, 22);
}

}  // namespace octl
