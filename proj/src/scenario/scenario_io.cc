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

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>

#include "deepfdaf/error.h"
#include "deepfdaf/scenario.h"
#include "deepfdaf/wav.h"

namespace deepfdaf::scenario {
namespace {

static_assert(std::endian::native == std::endian::little,
              "raw AIR files assume a little-endian host");

using nlohmann::json;

void write_f64(const std::filesystem::path& path, std::span<const double> v) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
}

std::vector<double> read_f64(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  if (bytes.size() % sizeof(double) != 0) {
    throw Error(ErrorKind::kInvalidInput,
                path.string() + ": size is not a multiple of 8 bytes");
  }
  std::vector<double> v(bytes.size() / sizeof(double));
  std::memcpy(v.data(), bytes.data(), bytes.size());
  return v;
}

json draw_json(const SegmentDraw& d) {
  return {{"seed", d.seed},
          {"t60_s", d.t60_s},
          {"speech_snr_db", d.speech_snr_db},
          {"white_snr_db", d.white_snr_db}};
}

SegmentDraw draw_from(const json& j) {
  SegmentDraw d;
  d.seed = j.at("seed").get<std::uint64_t>();
  d.t60_s = j.at("t60_s").get<double>();
  d.speech_snr_db = j.at("speech_snr_db").get<double>();
  d.white_snr_db = j.at("white_snr_db").get<double>();
  return d;
}

}  // namespace

void write_scenario(const std::filesystem::path& dir, const Scenario& s) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string());
  io::write_wav(dir / "x.wav", s.x, s.sample_rate);
  io::write_wav(dir / "y.wav", s.y, s.sample_rate);
  io::write_wav(dir / "n.wav", s.n, s.sample_rate);
  write_f64(dir / "air_pre.f64", s.air_pre);
  write_f64(dir / "air_post.f64", s.air_post);
  const json meta = {
      {"format", "deepfdaf-scenario"},
      {"version", 1},
      {"sample_rate", s.sample_rate},
      {"fft_size", s.dims.fft_size},
      {"hop", s.dims.hop},
      {"seed", s.seed},
      {"num_samples", s.x.size()},
      {"air_length", s.air_pre.size()},
      {"switch_block", s.switch_block},
      {"pre", draw_json(s.pre)},
      {"post", draw_json(s.post)},
  };
  std::ofstream out(dir / "meta.json");
  out << meta.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::kIo, "cannot write meta.json in " + dir.string());
}

Scenario read_scenario(const std::filesystem::path& dir) {
  std::ifstream in(dir / "meta.json");
  if (!in) throw Error(ErrorKind::kIo, "missing meta.json in " + dir.string());
  json meta;
  FrameDims dims;
  double rate = 0.0;
  std::size_t switch_block = 0;
  std::size_t num_samples = 0;
  SegmentDraw pre;
  SegmentDraw post;
  std::uint64_t seed = 0;
  try {
    meta = json::parse(in);
    dims.fft_size = meta.at("fft_size").get<std::size_t>();
    dims.hop = meta.at("hop").get<std::size_t>();
    rate = meta.at("sample_rate").get<double>();
    switch_block = meta.at("switch_block").get<std::size_t>();
    num_samples = meta.at("num_samples").get<std::size_t>();
    seed = meta.at("seed").get<std::uint64_t>();
    pre = draw_from(meta.at("pre"));
    post = draw_from(meta.at("post"));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidInput,
                dir.string() + "/meta.json: " + e.what());
  }
  io::WavData x = io::read_wav(dir / "x.wav");
  io::WavData n = io::read_wav(dir / "n.wav");
  if (x.samples.size() != num_samples || n.samples.size() != num_samples) {
    throw Error(ErrorKind::kInvalidInput,
                dir.string() + ": track lengths disagree with meta.json");
  }
  if (std::lround(x.sample_rate) != std::lround(rate) ||
      std::lround(n.sample_rate) != std::lround(rate)) {
    throw Error(ErrorKind::kInvalidInput,
                dir.string() + ": sample rate disagrees with meta.json");
  }
  Scenario s = assemble_scenario(dims, rate, std::move(x.samples),
                                 read_f64(dir / "air_pre.f64"),
                                 read_f64(dir / "air_post.f64"), switch_block,
                                 std::move(n.samples));
  s.seed = seed;
  s.pre = pre;
  s.post = post;
  return s;
}

}  // namespace deepfdaf::scenario
