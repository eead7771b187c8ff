// core/include/octl/checkpoint.hpp

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

#ifndef OCTL_CHECKPOINT_HPP_
#define OCTL_CHECKPOINT_HPP_

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "octl/error.hpp"
#include "octl/model.hpp"
#include "octl/regularizers.hpp"

namespace octl {

// On-disk container shared by checkpoints and Fisher snapshots:
//   magic "OCTL", format version u16 LE,
//   metadata length u32 LE, metadata bytes (text, key=value per line),
//   then segments until EOF: name length u16 LE, name bytes,
//   element count u64 LE, elements as 64-bit LE floats.
// Doubles are stored bit-exactly, so a write/read round trip and a rerun
// with the same seed produce byte-identical files.

inline constexpr std::uint16_t kContainerVersion = 1;

struct Container {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::pair<std::string, std::vector<double>>> segments;

  const std::string* Find(const std::string& key) const;
};

void WriteContainer(const std::filesystem::path& path, const Container& c);
Container ReadContainer(const std::filesystem::path& path,
                        ErrorCode on_corrupt);

void WriteCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint ReadCheckpoint(const std::filesystem::path& path);

// Fisher snapshots reuse the container; fisher segments carry a "fisher."
// name prefix, the anchor keeps the plain parameter layout.
void WriteFisherSnapshot(const std::filesystem::path& path,
                         const FisherSnapshot& snap, const ModelConfig& cfg);
FisherSnapshot ReadFisherSnapshot(const std::filesystem::path& path,
                                  ModelConfig* model_out = nullptr);

}  // namespace octl

#endif  // OCTL_CHECKPOINT_HPP_
