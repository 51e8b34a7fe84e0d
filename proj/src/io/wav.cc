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

#include "deepfdaf/wav.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "deepfdaf/error.h"

namespace deepfdaf::io {
namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xfffe;

template <typename T>
T load(const std::vector<char>& buf, std::size_t pos) {
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  return v;
}

template <typename T>
void put(std::string& out, T v) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  out.append(bytes, sizeof(T));
}

[[noreturn]] void bad(const std::filesystem::path& path, const std::string& msg) {
  throw Error(ErrorKind::kInvalidInput, path.string() + ": " + msg);
}

}  // namespace

WavData read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  const std::vector<char> buf((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    bad(path, "not a RIFF/WAVE file");
  }
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint16_t bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t data_pos = 0;
  std::size_t data_len = 0;
  bool have_data = false;
  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const std::uint32_t len = load<std::uint32_t>(buf, pos + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = std::min<std::size_t>(len, buf.size() - body);
    if (std::memcmp(buf.data() + pos, "fmt ", 4) == 0) {
      if (avail < 16) bad(path, "short fmt chunk");
      format = load<std::uint16_t>(buf, body);
      channels = load<std::uint16_t>(buf, body + 2);
      rate = load<std::uint32_t>(buf, body + 4);
      bits = load<std::uint16_t>(buf, body + 14);
      if (format == kFormatExtensible && avail >= 26) {
        format = load<std::uint16_t>(buf, body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(buf.data() + pos, "data", 4) == 0) {
      data_pos = body;
      data_len = avail;
      have_data = true;
    }
    pos = body + len + (len & 1);
  }
  if (!have_fmt || !have_data) bad(path, "missing fmt or data chunk");
  if (channels != 1) bad(path, "only mono files are supported");

  WavData out;
  out.sample_rate = rate;
  if (format == kFormatPcm && bits == 16) {
    out.samples.resize(data_len / 2);
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
      out.samples[i] = load<std::int16_t>(buf, data_pos + 2 * i) / 32768.0;
    }
  } else if (format == kFormatFloat && bits == 32) {
    out.samples.resize(data_len / 4);
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
      out.samples[i] = load<float>(buf, data_pos + 4 * i);
    }
  } else {
    bad(path, "unsupported sample format (need 16-bit PCM or 32-bit float)");
  }
  return out;
}

void write_wav(const std::filesystem::path& path,
               std::span<const double> samples, double sample_rate,
               WavEncoding encoding) {
  const bool pcm = encoding == WavEncoding::kPcm16;
  const std::uint16_t bytes_per_sample = pcm ? 2 : 4;
  const auto rate = static_cast<std::uint32_t>(std::lround(sample_rate));
  const auto data_len =
      static_cast<std::uint32_t>(samples.size() * bytes_per_sample);
  std::string out;
  out.reserve(44 + data_len);
  out.append("RIFF");
  put<std::uint32_t>(out, 36 + data_len);
  out.append("WAVEfmt ");
  put<std::uint32_t>(out, 16);
  put<std::uint16_t>(out, pcm ? kFormatPcm : kFormatFloat);
  put<std::uint16_t>(out, 1);
  put<std::uint32_t>(out, rate);
  put<std::uint32_t>(out, rate * bytes_per_sample);
  put<std::uint16_t>(out, bytes_per_sample);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(8 * bytes_per_sample));
  out.append("data");
  put<std::uint32_t>(out, data_len);
  for (double s : samples) {
    if (pcm) {
      const double c = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
      put<std::int16_t>(out, static_cast<std::int16_t>(c));
    } else {
      put<float>(out, static_cast<float>(s));
    }
  }
  std::ofstream f(path, std::ios::binary);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error(ErrorKind::kIo, "cannot write " + path.string());
}

}  // namespace deepfdaf::io
