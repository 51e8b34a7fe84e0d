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

#ifndef DEEPFDAF_WAV_H_
#define DEEPFDAF_WAV_H_

#include <filesystem>
#include <span>
#include <vector>

namespace deepfdaf::io {

enum class WavEncoding { kPcm16, kFloat32 };

struct WavData {
  double sample_rate = 0.0;
  std::vector<double> samples;
};

// Mono 16-bit PCM or 32-bit float RIFF files. Throws kInvalidInput for
// unsupported layouts and kIo on filesystem errors.
WavData read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path,
               std::span<const double> samples, double sample_rate,
               WavEncoding encoding = WavEncoding::kFloat32);

}  // namespace deepfdaf::io

#endif  // DEEPFDAF_WAV_H_
