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

#ifndef DEEPFDAF_CHECKPOINT_H_
#define DEEPFDAF_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "deepfdaf/neural.h"
#include "deepfdaf/spectral.h"
#include "deepfdaf/training.h"

namespace deepfdaf::io {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  FrameDims frame{256, 128};
  std::string variant = "dnn_fdaf";
  std::uint64_t seed = 0;
  std::uint64_t epoch = 0;  // completed epochs
  double last_loss = 0.0;
  neural::NormalizationStats stats;
  neural::NetworkParameters params;
  std::optional<training::OptimizerState> optimizer;
};

// Tensors are stored as 32-bit floats; loading widens them back to double.
// The file is written to a temporary and renamed into place.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
// Validates every tensor shape against the stored dimensions.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace deepfdaf::io

#endif  // DEEPFDAF_CHECKPOINT_H_
