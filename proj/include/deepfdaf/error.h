/*
 * Copyright 2026 The deepfdaf Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DEEPFDAF_ERROR_H_
#define DEEPFDAF_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace deepfdaf {

enum class ErrorKind {
  kInvalidDimension,
  kInvalidConfig,
  kInvalidInput,
  kInvalidMask,
  kUpdateRejected,
  kTrainingDiverged,
  kIo,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Non-finite loss during training. Carries the 0-based block where the
// sequence loss first became non-finite.
class TrainingDiverged : public Error {
 public:
  TrainingDiverged(std::size_t block, const std::string& what)
      : Error(ErrorKind::kTrainingDiverged, what), block_(block) {}

  std::size_t block() const { return block_; }

 private:
  std::size_t block_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidDimension: return "invalid-dimension";
    case ErrorKind::kInvalidConfig: return "invalid-config";
    case ErrorKind::kInvalidInput: return "invalid-input";
    case ErrorKind::kInvalidMask: return "invalid-mask";
    case ErrorKind::kUpdateRejected: return "update-rejected";
    case ErrorKind::kTrainingDiverged: return "training-diverged";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace deepfdaf

#endif  // DEEPFDAF_ERROR_H_
