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

#ifndef HCMFLIGHT_COMMON_H_
#define HCMFLIGHT_COMMON_H_

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace hcmflight {

using Scalar = double;

using Vec3 = Eigen::Vector3<Scalar>;
using Vec4 = Eigen::Vector4<Scalar>;
using Vec6 = Eigen::Vector<Scalar, 6>;
using VecX = Eigen::VectorX<Scalar>;
using MatX = Eigen::MatrixX<Scalar>;
using Mat3 = Eigen::Matrix3<Scalar>;
using Quat = Eigen::Quaternion<Scalar>;

// All stochastic components take an explicit engine; nothing is global.
using Rng = std::mt19937_64;

// Raised when a simulation or network quantity becomes NaN/Inf.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr Scalar kPi = std::numbers::pi_v<Scalar>;

// Wraps an angle into [-pi, pi].
inline Scalar wrap_angle(Scalar angle) {
  return std::remainder(angle, 2.0 * kPi);
}

}  // namespace hcmflight

#endif  // HCMFLIGHT_COMMON_H_
