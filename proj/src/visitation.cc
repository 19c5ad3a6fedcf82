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

#include "hcmflight/visitation.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace hcmflight {

VisitationGrid::VisitationGrid(int rows, int cols, Scalar x_max, Scalar y_max)
    : rows_(rows), cols_(cols), x_max_(x_max), y_max_(y_max) {
  if (rows <= 0 || cols <= 0 || !(x_max > 0) || !(y_max > 0)) {
    throw std::invalid_argument("VisitationGrid: dimensions and extent must be > 0");
  }
  counts_.assign(static_cast<size_t>(rows) * cols, 0);
}

std::pair<int, int> VisitationGrid::cell_of(Scalar x, Scalar y) const {
  const Scalar u = (x + x_max_) / (2.0 * x_max_);
  const Scalar v = (y_max_ - y) / (2.0 * y_max_);
  const int col = std::clamp(static_cast<int>(std::floor(u * cols_)), 0, cols_ - 1);
  const int row = std::clamp(static_cast<int>(std::floor(v * rows_)), 0, rows_ - 1);
  return {row, col};
}

bool VisitationGrid::add(Scalar x, Scalar y) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw NumericalError("VisitationGrid::add: non-finite position");
  }
  const auto [row, col] = cell_of(x, y);
  ++counts_[row * cols_ + col];
  const bool inside = std::abs(x) <= x_max_ && std::abs(y) <= y_max_;
  if (inside) {
    ++in_bounds_;
  } else {
    ++clamped_;
  }
  return inside;
}

void VisitationGrid::clear() {
  std::fill(counts_.begin(), counts_.end(), 0);
  in_bounds_ = clamped_ = 0;
}

std::uint64_t VisitationGrid::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::uint64_t VisitationGrid::max_count() const {
  return *std::max_element(counts_.begin(), counts_.end());
}

MatX VisitationGrid::normalized() const {
  MatX out = MatX::Zero(rows_, cols_);
  const std::uint64_t peak = max_count();
  if (peak == 0) return out;
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c)
      out(r, c) = static_cast<Scalar>(count(r, c)) / static_cast<Scalar>(peak);
  return out;
}

std::string VisitationGrid::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "# hcmflight-visitation rows=" << rows_ << " cols=" << cols_
     << " x_max=" << x_max_ << " y_max=" << y_max_ << "\n";
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) os << (c ? "," : "") << count(r, c);
    os << "\n";
  }
  return os.str();
}

VisitationGrid VisitationGrid::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  std::getline(in, header);
  int rows = 0, cols = 0;
  double x_max = 0, y_max = 0;
  if (std::sscanf(header.c_str(), "# hcmflight-visitation rows=%d cols=%d x_max=%lf y_max=%lf",
                  &rows, &cols, &x_max, &y_max) != 4) {
    throw std::runtime_error("visitation grid: bad header line");
  }
  VisitationGrid grid(rows, cols, x_max, y_max);
  std::string line;
  for (int r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) throw std::runtime_error("visitation grid: missing rows");
    std::stringstream ss(line);
    std::string cell;
    for (int c = 0; c < cols; ++c) {
      if (!std::getline(ss, cell, ',')) {
        throw std::runtime_error("visitation grid: short row " + std::to_string(r));
      }
      const auto v = std::stoull(cell);
      grid.counts_[r * cols + c] = v;
      grid.in_bounds_ += v;
    }
  }
  return grid;
}

void update_visitation(VisitationGrid& grid, const Eigen::Ref<const MatX>& positions) {
  if (positions.rows() < 2) {
    throw std::invalid_argument("update_visitation: positions need x and y rows");
  }
  std::uint64_t outside = 0;
  for (Eigen::Index i = 0; i < positions.cols(); ++i) {
    if (!grid.add(positions(0, i), positions(1, i))) ++outside;
  }
  if (outside > 0) {
    std::clog << "[viz] " << outside
              << " positions outside the grid bounds were counted in edge cells\n";
  }
}

GrayImage render_grid(const VisitationGrid& grid) {
  GrayImage img;
  img.width = grid.cols();
  img.height = grid.rows();
  img.pixels.assign(static_cast<size_t>(img.width) * img.height, 0);
  if (grid.max_count() == 0) {
    std::clog << "[viz] warning: empty visitation grid renders as all zeros\n";
    return img;
  }
  const MatX v = grid.normalized();
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c)
      img.pixels[r * img.width + c] =
          static_cast<std::uint8_t>(std::floor(255.0 * v(r, c) + 0.5));
  return img;
}

std::string normalized_csv(const VisitationGrid& grid) {
  const MatX v = grid.normalized();
  std::ostringstream os;
  os.precision(17);
  for (int r = 0; r < v.rows(); ++r) {
    for (int c = 0; c < v.cols(); ++c) os << (c ? "," : "") << v(r, c);
    os << "\n";
  }
  return os.str();
}

void write_pgm(const std::string& path, const GrayImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image: " + path);
  out << "P5\n# hcmflight visitation; row 0 = +y edge, column 0 = -x edge\n"
      << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
}

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read image: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw std::runtime_error("not a binary PGM: " + path);
  auto next_int = [&in]() {
    in >> std::ws;
    while (in.peek() == '#') {
      std::string comment;
      std::getline(in, comment);
      in >> std::ws;
    }
    int v = 0;
    in >> v;
    return v;
  };
  GrayImage img;
  img.width = next_int();
  img.height = next_int();
  const int maxval = next_int();
  if (maxval != 255) throw std::runtime_error("unsupported PGM maxval");
  in.get();
  img.pixels.resize(static_cast<size_t>(img.width) * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (!in) throw std::runtime_error("truncated PGM: " + path);
  return img;
}

}  // namespace hcmflight
