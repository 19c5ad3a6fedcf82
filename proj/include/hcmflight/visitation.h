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

#ifndef HCMFLIGHT_VISITATION_H_
#define HCMFLIGHT_VISITATION_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hcmflight/common.h"

namespace hcmflight {

// Top-view visit counter over [-x_max, x_max] x [-y_max, y_max]. Row 0 is the
// +y edge and column 0 the -x edge, so the grid reads like a map.
class VisitationGrid {
 public:
  VisitationGrid(int rows, int cols, Scalar x_max, Scalar y_max);

  // Row/column of the cell containing (x, y); outside points map to the
  // nearest edge cell.
  std::pair<int, int> cell_of(Scalar x, Scalar y) const;

  // Adds one visit. Returns false when the point lay outside the bounds and
  // was accumulated in a clamped edge cell.
  bool add(Scalar x, Scalar y);

  void clear();

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Scalar x_max() const { return x_max_; }
  Scalar y_max() const { return y_max_; }
  std::uint64_t count(int row, int col) const { return counts_[row * cols_ + col]; }
  std::uint64_t total() const;
  std::uint64_t max_count() const;
  std::uint64_t in_bounds_visits() const { return in_bounds_; }
  std::uint64_t clamped_visits() const { return clamped_; }

  // Counts divided by the maximum count; all zero for an empty grid.
  MatX normalized() const;

  // Raw counts with a one-line header describing the extent.
  std::string to_csv() const;
  static VisitationGrid from_csv(const std::string& text);

 private:
  int rows_;
  int cols_;
  Scalar x_max_;
  Scalar y_max_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t in_bounds_ = 0;
  std::uint64_t clamped_ = 0;
};

// Adds every XY position of a trajectory (3 x T or 2 x T columns).
void update_visitation(VisitationGrid& grid, const Eigen::Ref<const MatX>& positions);

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, height rows of width bytes
};

// value = count / max, pixel = floor(255 value + 0.5).
GrayImage render_grid(const VisitationGrid& grid);
std::string normalized_csv(const VisitationGrid& grid);

// Binary portable graymap (P5, maxval 255) with a comment line stating the
// orientation.
void write_pgm(const std::string& path, const GrayImage& image);
GrayImage read_pgm(const std::string& path);

}  // namespace hcmflight

#endif  // HCMFLIGHT_VISITATION_H_
