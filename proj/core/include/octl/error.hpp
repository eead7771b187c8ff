// core/include/octl/error.hpp

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

#ifndef OCTL_ERROR_HPP_
#define OCTL_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace octl {

enum class ErrorCode {
  kInvalidInventory,
  kInvalidLabel,
  kEmptyTarget,
  kUnreachableTarget,
  kInstanceTooLarge,
  kInvalidBoundaries,
  kLayoutMismatch,
  kShapeMismatch,
  kCorruptSnapshot,
  kCorruptDataset,
  kCorruptCheckpoint,
  kUncoverableWord,
  kGradientExplosion,
  kEmptyDataset,
  kEmptyReference,
  kConfigError,
  kIoError,
  kVerificationFailure,
};

const char* ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception. The code keeps
// failure identity machine-checkable; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Throw(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace octl

#endif  // OCTL_ERROR_HPP_
