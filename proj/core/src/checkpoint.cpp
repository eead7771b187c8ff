// core/src/checkpoint.cpp

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

#include "octl/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "octl/error.hpp"

namespace octl {

namespace {

constexpr char kMagic[4] = {'O', 'C', 'T', 'L'};

void PutBytes(std::ostream& os, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) {
    os.put(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

std::uint64_t GetBytes(std::istream& is, int bytes, ErrorCode on_corrupt) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = is.get();
    if (c == EOF) Throw(on_corrupt, "unexpected end of file");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);  // hex float, exact round trip
  return buf;
}

double ParseDouble(const std::string& s, ErrorCode on_corrupt) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) Throw(on_corrupt, "bad float value: " + s);
  return v;
}

std::uint64_t ParseU64(const std::string& s, ErrorCode on_corrupt) {
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    Throw(on_corrupt, "bad integer value: " + s);
  }
}

const std::string& Require(const Container& c, const std::string& key,
                           ErrorCode on_corrupt) {
  const std::string* v = c.Find(key);
  if (v == nullptr) Throw(on_corrupt, "missing metadata key " + key);
  return *v;
}

ModelConfig ModelFromMetadata(const Container& c, ErrorCode on_corrupt) {
  ModelConfig cfg;
  cfg.feature_dim = ParseU64(Require(c, "feature_dim", on_corrupt), on_corrupt);
  cfg.context_window =
      ParseU64(Require(c, "context_window", on_corrupt), on_corrupt);
  cfg.hidden_size = ParseU64(Require(c, "hidden_size", on_corrupt), on_corrupt);
  cfg.num_units = ParseU64(Require(c, "num_units", on_corrupt), on_corrupt);
  cfg.seed = ParseU64(Require(c, "model_seed", on_corrupt), on_corrupt);
  return cfg;
}

void AppendModelMetadata(Container& c, const ModelConfig& cfg) {
  c.metadata.emplace_back("feature_dim", std::to_string(cfg.feature_dim));
  c.metadata.emplace_back("context_window",
                          std::to_string(cfg.context_window));
  c.metadata.emplace_back("hidden_size", std::to_string(cfg.hidden_size));
  c.metadata.emplace_back("num_units", std::to_string(cfg.num_units));
  c.metadata.emplace_back("model_seed", std::to_string(cfg.seed));
}

// Copies named segments into a parameter vector with the model's layout.
ParamVector ParamsFromSegments(const Container& c, const ModelConfig& cfg,
                               const std::string& prefix,
                               ErrorCode on_corrupt) {
  ParamVector params = ZeroParams(cfg);
  for (const auto& [name, len] : params.layout) {
    bool found = false;
    for (const auto& [seg_name, values] : c.segments) {
      if (seg_name != prefix + name) continue;
      if (values.size() != len) {
        Throw(on_corrupt, "segment " + seg_name + " has wrong length");
      }
      std::copy(values.begin(), values.end(), params.Segment(name).begin());
      found = true;
      break;
    }
    if (!found) Throw(on_corrupt, "missing segment " + prefix + name);
  }
  return params;
}

}  // namespace

const std::string* Container::Find(const std::string& key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return &v;
  }
  return nullptr;
}

void WriteContainer(const std::filesystem::path& path, const Container& c) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) Throw(ErrorCode::kIoError, "cannot open " + path.string());

  os.write(kMagic, 4);
  PutBytes(os, kContainerVersion, 2);

  std::string meta;
  for (const auto& [k, v] : c.metadata) {
    meta += k;
    meta += '=';
    meta += v;
    meta += '\n';
  }
  PutBytes(os, meta.size(), 4);
  os.write(meta.data(), static_cast<std::streamsize>(meta.size()));

  for (const auto& [name, values] : c.segments) {
    PutBytes(os, name.size(), 2);
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    PutBytes(os, values.size(), 8);
    for (double v : values) {
      PutBytes(os, std::bit_cast<std::uint64_t>(v), 8);
    }
  }
  os.flush();
  if (!os) Throw(ErrorCode::kIoError, "write failed for " + path.string());
}

Container ReadContainer(const std::filesystem::path& path,
                        ErrorCode on_corrupt) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Throw(ErrorCode::kIoError, "cannot open " + path.string());

  char magic[4];
  is.read(magic, 4);
  if (is.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0) {
    Throw(on_corrupt, "bad magic in " + path.string());
  }
  const auto version = GetBytes(is, 2, on_corrupt);
  if (version != kContainerVersion) {
    Throw(on_corrupt, "unsupported format version " + std::to_string(version));
  }

  Container c;
  const auto meta_len = GetBytes(is, 4, on_corrupt);
  std::string meta(meta_len, '\0');
  is.read(meta.data(), static_cast<std::streamsize>(meta_len));
  if (static_cast<std::uint64_t>(is.gcount()) != meta_len) {
    Throw(on_corrupt, "truncated metadata");
  }
  std::istringstream lines(meta);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) Throw(on_corrupt, "bad metadata line");
    c.metadata.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }

  while (is.peek() != EOF) {
    const auto name_len = GetBytes(is, 2, on_corrupt);
    std::string name(name_len, '\0');
    is.read(name.data(), static_cast<std::streamsize>(name_len));
    if (static_cast<std::uint64_t>(is.gcount()) != name_len) {
      Throw(on_corrupt, "truncated segment name");
    }
    const auto count = GetBytes(is, 8, on_corrupt);
    std::vector<double> values(count);
    for (auto& v : values) {
      v = std::bit_cast<double>(GetBytes(is, 8, on_corrupt));
    }
    c.segments.emplace_back(std::move(name), std::move(values));
  }
  return c;
}

void WriteCheckpoint(const std::filesystem::path& path,
                     const Checkpoint& ckpt) {
  Container c;
  c.metadata.emplace_back("format", "checkpoint");
  AppendModelMetadata(c, ckpt.model);
  c.metadata.emplace_back("step", std::to_string(ckpt.step));
  c.metadata.emplace_back("validation_loss",
                          FormatDouble(ckpt.validation_loss));
  c.metadata.emplace_back("rng_state", ckpt.rng_state);

  for (const auto& [name, len] : ckpt.params.layout) {
    const auto seg = ckpt.params.Segment(name);
    c.segments.emplace_back(name,
                            std::vector<double>(seg.begin(), seg.end()));
  }
  WriteContainer(path, c);
}

Checkpoint ReadCheckpoint(const std::filesystem::path& path) {
  constexpr auto kBad = ErrorCode::kCorruptCheckpoint;
  const Container c = ReadContainer(path, kBad);
  if (Require(c, "format", kBad) != "checkpoint") {
    Throw(kBad, path.string() + " is not a checkpoint");
  }
  Checkpoint ckpt;
  ckpt.model = ModelFromMetadata(c, kBad);
  ckpt.step = ParseU64(Require(c, "step", kBad), kBad);
  ckpt.validation_loss = ParseDouble(Require(c, "validation_loss", kBad), kBad);
  if (const std::string* state = c.Find("rng_state")) ckpt.rng_state = *state;
  ckpt.params = ParamsFromSegments(c, ckpt.model, "", kBad);
  return ckpt;
}

void WriteFisherSnapshot(const std::filesystem::path& path,
                         const FisherSnapshot& snap, const ModelConfig& cfg) {
  ValidateSnapshot(snap);
  Container c;
  c.metadata.emplace_back("format", "fisher");
  AppendModelMetadata(c, cfg);
  c.metadata.emplace_back("dataset_size", std::to_string(snap.dataset_size));

  for (const auto& [name, len] : snap.anchor.layout) {
    const auto seg = snap.anchor.Segment(name);
    c.segments.emplace_back(name,
                            std::vector<double>(seg.begin(), seg.end()));
  }
  std::size_t offset = 0;
  for (const auto& [name, len] : snap.anchor.layout) {
    c.segments.emplace_back(
        "fisher." + name,
        std::vector<double>(snap.fisher.begin() + offset,
                            snap.fisher.begin() + offset + len));
    offset += len;
  }
  WriteContainer(path, c);
}

FisherSnapshot ReadFisherSnapshot(const std::filesystem::path& path,
                                  ModelConfig* model_out) {
  constexpr auto kBad = ErrorCode::kCorruptSnapshot;
  const Container c = ReadContainer(path, kBad);
  if (Require(c, "format", kBad) != "fisher") {
    Throw(kBad, path.string() + " is not a fisher snapshot");
  }
  const ModelConfig cfg = ModelFromMetadata(c, kBad);
  if (model_out != nullptr) *model_out = cfg;

  FisherSnapshot snap;
  snap.dataset_size = ParseU64(Require(c, "dataset_size", kBad), kBad);
  snap.anchor = ParamsFromSegments(c, cfg, "", kBad);
  const ParamVector fisher = ParamsFromSegments(c, cfg, "fisher.", kBad);
  snap.fisher = fisher.values;
  ValidateSnapshot(snap);
  return snap;
}

}  // namespace octl
