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

#include "deepfdaf/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <vector>

#include "deepfdaf/error.h"

namespace deepfdaf::io {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'D', 'F', 'D', 'A', 'F', 'C', 'K', 'P'};
constexpr std::uint32_t kMaxName = 4096;

class Writer {
 public:
  template <typename T>
  void put(T v) {
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    buf_.append(b, sizeof(T));
  }
  void str(const std::string& s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    buf_.append(s);
  }
  void tensor(const std::string& name, std::vector<std::uint32_t> shape,
              std::span<const double> data) {
    str(name);
    put<std::uint32_t>(static_cast<std::uint32_t>(shape.size()));
    for (std::uint32_t d : shape) put<std::uint32_t>(d);
    for (double v : data) put<float>(static_cast<float>(v));
  }
  std::string& buf() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(std::vector<char> data, std::string source)
      : data_(std::move(data)), source_(std::move(source)) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string str() {
    const auto n = get<std::uint32_t>();
    if (n > kMaxName) fail("string field too long");
    need(n);
    std::string s(data_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::kInvalidInput, source_ + ": " + msg);
  }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) fail("truncated checkpoint");
  }

  std::vector<char> data_;
  std::string source_;
  std::size_t pos_ = 0;
};

struct StoredTensor {
  std::vector<std::uint32_t> shape;
  std::vector<double> data;
};

std::vector<std::uint32_t> shape_of(const neural::TensorInfo& t) {
  if (t.cols == 1) return {static_cast<std::uint32_t>(t.rows)};
  return {static_cast<std::uint32_t>(t.rows), static_cast<std::uint32_t>(t.cols)};
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  const std::size_t features = c.frame.fft_size + 2;
  if (c.stats.nu.size() != features || c.stats.sigma.size() != features) {
    throw Error(ErrorKind::kInvalidDimension,
                "normalization stats do not match the frame size");
  }
  if (c.params.dims().fft_size != c.frame.fft_size) {
    throw Error(ErrorKind::kInvalidDimension,
                "network dims do not match the frame size");
  }
  Writer w;
  w.buf().append(kMagic, sizeof(kMagic));
  w.put<std::uint32_t>(c.version);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(c.frame.fft_size));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(c.frame.hop));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(c.params.dims().hidden));
  w.str(c.variant);
  w.put<std::uint64_t>(c.seed);
  w.put<std::uint64_t>(c.epoch);
  w.put<std::uint64_t>(c.optimizer ? c.optimizer->step : 0);
  w.put<double>(c.last_loss);

  const auto& layout = c.params.layout();
  const std::uint32_t count = static_cast<std::uint32_t>(
      2 + layout.size() + (c.optimizer ? 2 : 0));
  w.put<std::uint32_t>(count);
  const auto f = static_cast<std::uint32_t>(features);
  w.tensor("norm.nu", {f}, c.stats.nu);
  w.tensor("norm.sigma", {f}, c.stats.sigma);
  for (const auto& t : layout) {
    w.tensor(t.name, shape_of(t), c.params.tensor(t.name));
  }
  if (c.optimizer) {
    const auto n = static_cast<std::uint32_t>(c.params.size());
    if (c.optimizer->m.size() != n || c.optimizer->v.size() != n) {
      throw Error(ErrorKind::kInvalidDimension,
                  "optimizer state does not match the parameter count");
    }
    w.tensor("adam.m", {n}, c.optimizer->m);
    w.tensor("adam.v", {n}, c.optimizer->v);
  }

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(w.buf().data(), static_cast<std::streamsize>(w.buf().size()));
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot move checkpoint to " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  Reader r(std::vector<char>((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>()),
           path.string());
  char magic[sizeof(kMagic)];
  for (char& ch : magic) ch = r.get<char>();
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) r.fail("bad magic");

  Checkpoint c;
  c.version = r.get<std::uint32_t>();
  if (c.version != kCheckpointVersion) {
    r.fail("unsupported checkpoint version " + std::to_string(c.version));
  }
  c.frame.fft_size = r.get<std::uint32_t>();
  c.frame.hop = r.get<std::uint32_t>();
  const std::size_t hidden = r.get<std::uint32_t>();
  c.variant = r.str();
  c.seed = r.get<std::uint64_t>();
  c.epoch = r.get<std::uint64_t>();
  const std::uint64_t adam_step = r.get<std::uint64_t>();
  c.last_loss = r.get<double>();

  const neural::NetworkDims ndims{c.frame.fft_size, hidden};
  try {
    c.frame.validate();
    ndims.validate();
  } catch (const Error& e) {
    r.fail(std::string("invalid dimensions: ") + e.what());
  }

  std::map<std::string, StoredTensor> tensors;
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.str();
    StoredTensor t;
    const auto ndim = r.get<std::uint32_t>();
    if (ndim == 0 || ndim > 2) r.fail("tensor " + name + ": bad rank");
    std::size_t n = 1;
    for (std::uint32_t k = 0; k < ndim; ++k) {
      t.shape.push_back(r.get<std::uint32_t>());
      n *= t.shape.back();
    }
    if (n > (std::size_t{1} << 31)) r.fail("tensor " + name + " too large");
    t.data.resize(n);
    for (double& v : t.data) v = r.get<float>();
    if (!tensors.emplace(name, std::move(t)).second) {
      r.fail("duplicate tensor " + name);
    }
  }
  if (!r.done()) r.fail("trailing bytes");

  auto take = [&](const std::string& name,
                  const std::vector<std::uint32_t>& shape) {
    auto it = tensors.find(name);
    if (it == tensors.end()) r.fail("missing tensor " + name);
    if (it->second.shape != shape) r.fail("shape mismatch for " + name);
    std::vector<double> data = std::move(it->second.data);
    tensors.erase(it);
    return data;
  };
  const auto f = static_cast<std::uint32_t>(c.frame.fft_size + 2);
  c.stats.nu = take("norm.nu", {f});
  c.stats.sigma = take("norm.sigma", {f});
  c.params = neural::NetworkParameters(ndims);
  for (const auto& t : c.params.layout()) {
    const std::vector<double> data = take(t.name, shape_of(t));
    std::copy(data.begin(), data.end(), c.params.tensor(t.name).begin());
  }
  if (tensors.count("adam.m") || tensors.count("adam.v")) {
    const auto n = static_cast<std::uint32_t>(c.params.size());
    training::OptimizerState opt;
    opt.m = take("adam.m", {n});
    opt.v = take("adam.v", {n});
    opt.step = adam_step;
    c.optimizer = std::move(opt);
  }
  if (!tensors.empty()) r.fail("unknown tensor " + tensors.begin()->first);
  return c;
}

}  // namespace deepfdaf::io
