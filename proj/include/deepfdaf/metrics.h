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

#ifndef DEEPFDAF_METRICS_H_
#define DEEPFDAF_METRICS_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace deepfdaf::metrics {

inline constexpr double kNesdFloorDb = -120.0;
inline constexpr double kErleCapDb = 80.0;
inline constexpr double kErleReg = 1e-10;

// 10 log10(|w_true - [w_hat; 0]|^2 / |w_true|^2), floored at -120 dB.
// w_hat may be shorter than w_true.
double nesd_zero_padded_db(std::span<const double> w_true_full,
                           std::span<const double> w_hat);

// Recursively averaged echo return loss enhancement.
class ErleTracker {
 public:
  explicit ErleTracker(double smoothing = 0.99);

  // Returns the current estimate in dB, clamped to +-80 dB.
  double update(std::span<const double> d_block,
                std::span<const double> d_hat_block);

 private:
  double smoothing_;
  double num_ = 0.0;
  double den_ = 0.0;
};

struct MetricSeries {
  std::string run_id;
  double block_period_s = 0.0;
  std::vector<double> nesd_zp_db;
  std::vector<double> erle_db;
};

// Per-block arithmetic mean of dB series. Throws kInvalidInput on ragged or
// empty input.
std::vector<double> aggregate(std::span<const std::vector<double>> series);

MetricSeries aggregate_series(std::span<const MetricSeries> runs,
                              const std::string& run_id);

// Columns: block_index,time_s,nesd_zp_db,erle_db
void write_series_csv(const std::filesystem::path& path,
                      const MetricSeries& series);
MetricSeries read_series_csv(const std::filesystem::path& path);

}  // namespace deepfdaf::metrics

#endif  // DEEPFDAF_METRICS_H_
