// Copyright 2026 The hcmflight Authors
//
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

#ifndef HCMFLIGHT_METRICS_H_
#define HCMFLIGHT_METRICS_H_

#include <fstream>
#include <string>
#include <vector>

namespace hcmflight {

inline constexpr const char* kMetricsSchema = "hcmflight-metrics/1";

// One row per training batch.
struct MetricsRow {
  int batch = 0;
  double mean_r_ext = 0.0;
  double mean_r_int = 0.0;
  double failed_flights = 0.0;  // crash, obstacle_hit or out_of_bounds
  double flights = 0.0;         // all terminations
  double err_x = 0.0;
  double err_y = 0.0;
  double err_z = 0.0;
  double err_roll = 0.0;
  double err_pitch = 0.0;
  double err_yaw = 0.0;
  double goal_distance = 0.0;
  double obstacle_distance = 0.0;
  double policy_loss = 0.0;
  double value_loss_ext = 0.0;
  double value_loss_int = 0.0;
  double entropy = 0.0;
  double mean_ratio = 0.0;
  double clip_fraction = 0.0;
  double icm_loss_inverse = 0.0;
  double icm_loss_forward = 0.0;
  double hcm_loss_ss = 0.0;
  double hcm_loss_sr = 0.0;
  double hcm_mean_curiosity = 0.0;
  double hcm_bundles = 0.0;

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

std::vector<std::string> metrics_columns();
std::string metrics_header();
// Shortest round-trip decimal formatting, so parse(format(row)) == row.
std::string format_metrics_row(const MetricsRow& row);
MetricsRow parse_metrics_row(const std::string& line);

// Reads a metrics file written by MetricsWriter; validates the schema line.
std::vector<MetricsRow> read_metrics_csv(const std::string& path);

class MetricsWriter {
 public:
  explicit MetricsWriter(const std::string& path);
  void append(const MetricsRow& row);

 private:
  std::ofstream out_;
};

// Per-batch min/max/mean of every column across runs; rows are truncated to
// the shortest run.
std::string aggregate_metrics(const std::vector<std::vector<MetricsRow>>& runs);

}  // namespace hcmflight

#endif  // HCMFLIGHT_METRICS_H_
