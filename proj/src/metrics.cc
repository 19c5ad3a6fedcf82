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

#include "hcmflight/metrics.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace hcmflight {

namespace {

using Field = double MetricsRow::*;

const std::vector<std::pair<const char*, Field>>& fields() {
  static const std::vector<std::pair<const char*, Field>> f = {
      {"mean_r_ext", &MetricsRow::mean_r_ext},
      {"mean_r_int", &MetricsRow::mean_r_int},
      {"failed_flights", &MetricsRow::failed_flights},
      {"flights", &MetricsRow::flights},
      {"err_x", &MetricsRow::err_x},
      {"err_y", &MetricsRow::err_y},
      {"err_z", &MetricsRow::err_z},
      {"err_roll", &MetricsRow::err_roll},
      {"err_pitch", &MetricsRow::err_pitch},
      {"err_yaw", &MetricsRow::err_yaw},
      {"goal_distance", &MetricsRow::goal_distance},
      {"obstacle_distance", &MetricsRow::obstacle_distance},
      {"policy_loss", &MetricsRow::policy_loss},
      {"value_loss_ext", &MetricsRow::value_loss_ext},
      {"value_loss_int", &MetricsRow::value_loss_int},
      {"entropy", &MetricsRow::entropy},
      {"mean_ratio", &MetricsRow::mean_ratio},
      {"clip_fraction", &MetricsRow::clip_fraction},
      {"icm_loss_inverse", &MetricsRow::icm_loss_inverse},
      {"icm_loss_forward", &MetricsRow::icm_loss_forward},
      {"hcm_loss_ss", &MetricsRow::hcm_loss_ss},
      {"hcm_loss_sr", &MetricsRow::hcm_loss_sr},
      {"hcm_mean_curiosity", &MetricsRow::hcm_mean_curiosity},
      {"hcm_bundles", &MetricsRow::hcm_bundles},
  };
  return f;
}

std::string format_number(double v) {
  std::array<char, 64> buf;
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

double parse_number(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    // from_chars does not accept "inf"/"nan" spellings from every writer.
    if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw std::runtime_error("metrics: bad number '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

std::vector<std::string> metrics_columns() {
  std::vector<std::string> cols{"batch"};
  for (const auto& [name, field] : fields()) cols.emplace_back(name);
  return cols;
}

std::string metrics_header() {
  std::string out;
  for (const auto& c : metrics_columns()) out += (out.empty() ? "" : ",") + c;
  return out;
}

std::string format_metrics_row(const MetricsRow& row) {
  std::string out = std::to_string(row.batch);
  for (const auto& [name, field] : fields()) out += "," + format_number(row.*field);
  return out;
}

MetricsRow parse_metrics_row(const std::string& line) {
  const auto cells = split(line);
  if (cells.size() != fields().size() + 1) {
    throw std::runtime_error("metrics: expected " + std::to_string(fields().size() + 1) +
                             " columns, got " + std::to_string(cells.size()));
  }
  MetricsRow row;
  row.batch = std::stoi(cells[0]);
  for (size_t i = 0; i < fields().size(); ++i) {
    row.*(fields()[i].second) = parse_number(cells[i + 1]);
  }
  return row;
}

std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metrics file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != std::string("# schema: ") + kMetricsSchema) {
    throw std::runtime_error("metrics: missing or unsupported schema line in " + path);
  }
  if (!std::getline(in, line) || line != metrics_header()) {
    throw std::runtime_error("metrics: header mismatch in " + path);
  }
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(parse_metrics_row(line));
  }
  return rows;
}

MetricsWriter::MetricsWriter(const std::string& path) : out_(path) {
  if (!out_) throw std::runtime_error("cannot write metrics file: " + path);
  out_ << "# schema: " << kMetricsSchema << "\n" << metrics_header() << "\n";
  out_.flush();
}

void MetricsWriter::append(const MetricsRow& row) {
  out_ << format_metrics_row(row) << "\n";
  out_.flush();
}

std::string aggregate_metrics(const std::vector<std::vector<MetricsRow>>& runs) {
  if (runs.empty()) throw std::invalid_argument("aggregate_metrics: no runs");
  size_t rows = runs.front().size();
  for (const auto& r : runs) rows = std::min(rows, r.size());

  std::string out = "batch";
  for (const auto& [name, field] : fields()) {
    out += std::string(",") + name + "_min," + name + "_max," + name + "_mean";
  }
  out += "\n";
  for (size_t i = 0; i < rows; ++i) {
    out += std::to_string(runs.front()[i].batch);
    for (const auto& [name, field] : fields()) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      double sum = 0.0;
      for (const auto& run : runs) {
        const double v = run[i].*field;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
      }
      out += "," + format_number(lo) + "," + format_number(hi) + "," +
             format_number(sum / runs.size());
    }
    out += "\n";
  }
  return out;
}

}  // namespace hcmflight
