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

#include "deepfdaf/metrics.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "deepfdaf/error.h"

namespace deepfdaf::metrics {

double nesd_zero_padded_db(std::span<const double> w_true_full,
                           std::span<const double> w_hat) {
  if (w_hat.size() > w_true_full.size()) {
    throw Error(ErrorKind::kInvalidDimension,
                "estimate longer than the true response");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < w_true_full.size(); ++k) {
    const double diff = w_true_full[k] - (k < w_hat.size() ? w_hat[k] : 0.0);
    num += diff * diff;
    den += w_true_full[k] * w_true_full[k];
  }
  if (!(den > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "true response has zero norm");
  }
  if (!(num > 0.0)) return kNesdFloorDb;
  return std::max(kNesdFloorDb, 10.0 * std::log10(num / den));
}

ErleTracker::ErleTracker(double smoothing) : smoothing_(smoothing) {
  if (!(smoothing >= 0.0 && smoothing < 1.0)) {
    throw Error(ErrorKind::kInvalidConfig, "ERLE smoothing must be in [0, 1)");
  }
}

double ErleTracker::update(std::span<const double> d_block,
                           std::span<const double> d_hat_block) {
  if (d_block.size() != d_hat_block.size()) {
    throw Error(ErrorKind::kInvalidDimension, "ERLE block length mismatch");
  }
  double ed = 0.0;
  double er = 0.0;
  for (std::size_t i = 0; i < d_block.size(); ++i) {
    const double res = d_block[i] - d_hat_block[i];
    ed += d_block[i] * d_block[i];
    er += res * res;
  }
  num_ = smoothing_ * num_ + (1.0 - smoothing_) * ed;
  den_ = smoothing_ * den_ + (1.0 - smoothing_) * er;
  const double ratio = num_ / (den_ + kErleReg);
  if (!(ratio > 0.0)) return -kErleCapDb;
  return std::clamp(10.0 * std::log10(ratio), -kErleCapDb, kErleCapDb);
}

std::vector<double> aggregate(std::span<const std::vector<double>> series) {
  if (series.empty()) {
    throw Error(ErrorKind::kInvalidInput, "aggregate: no runs");
  }
  const std::size_t n = series.front().size();
  std::vector<double> mean(n, 0.0);
  for (const auto& s : series) {
    if (s.size() != n) {
      throw Error(ErrorKind::kInvalidInput, "aggregate: ragged series");
    }
    for (std::size_t i = 0; i < n; ++i) mean[i] += s[i];
  }
  for (double& v : mean) v /= static_cast<double>(series.size());
  return mean;
}

MetricSeries aggregate_series(std::span<const MetricSeries> runs,
                              const std::string& run_id) {
  if (runs.empty()) {
    throw Error(ErrorKind::kInvalidInput, "aggregate: no runs");
  }
  std::vector<std::vector<double>> nesd;
  std::vector<std::vector<double>> erle;
  for (const auto& r : runs) {
    nesd.push_back(r.nesd_zp_db);
    erle.push_back(r.erle_db);
  }
  MetricSeries out;
  out.run_id = run_id;
  out.block_period_s = runs.front().block_period_s;
  out.nesd_zp_db = aggregate(nesd);
  out.erle_db = aggregate(erle);
  return out;
}

void write_series_csv(const std::filesystem::path& path,
                      const MetricSeries& series) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << "block_index,time_s,nesd_zp_db,erle_db\n";
  out << std::setprecision(17);
  const std::size_t n =
      std::max(series.nesd_zp_db.size(), series.erle_db.size());
  for (std::size_t i = 0; i < n; ++i) {
    out << i << ',' << static_cast<double>(i) * series.block_period_s << ',';
    if (i < series.nesd_zp_db.size()) out << series.nesd_zp_db[i];
    out << ',';
    if (i < series.erle_db.size()) out << series.erle_db[i];
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

MetricSeries read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  MetricSeries s;
  s.run_id = path.stem().string();
  std::string line;
  std::getline(in, line);
  if (line != "block_index,time_s,nesd_zp_db,erle_db") {
    throw Error(ErrorKind::kInvalidInput, "unexpected CSV header in " +
                                              path.string());
  }
  std::vector<double> times;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field[4];
    for (auto& f : field) std::getline(ss, f, ',');
    times.push_back(std::stod(field[1]));
    if (!field[2].empty()) s.nesd_zp_db.push_back(std::stod(field[2]));
    if (!field[3].empty()) s.erle_db.push_back(std::stod(field[3]));
  }
  if (times.size() > 1) s.block_period_s = times[1] - times[0];
  return s;
}

}  // namespace deepfdaf::metrics
