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

#include "hcmflight/dynamics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hcmflight {

namespace {

void require_finite(const Eigen::Ref<const VecX>& v, const char* field) {
  if (!v.allFinite()) {
    throw NumericalError(std::string("non-finite rigid body field: ") + field);
  }
}

void check_state(const RigidBodyState& s) {
  require_finite(s.position, "position");
  require_finite(s.velocity, "velocity");
  require_finite(s.orientation.coeffs(), "orientation");
  require_finite(s.angular_velocity, "angular_velocity");
  require_finite(s.linear_accel, "linear_accel");
  require_finite(s.angular_accel, "angular_accel");
  require_finite(s.motor_speeds, "motor_speeds");
}

// Exact rotation increment for a constant body rate over dt.
Quat body_rate_increment(const Vec3& omega, Scalar dt) {
  const Scalar angle = omega.norm() * dt;
  if (angle < 1e-14) return Quat::Identity();
  return Quat(Eigen::AngleAxis<Scalar>(angle, omega.normalized()));
}

}  // namespace

void VehicleParams::validate() const {
  if (!(mass > 0)) throw std::invalid_argument("vehicle mass must be > 0");
  if (!(inertia_diag.array() > 0).all()) {
    throw std::invalid_argument("vehicle inertia components must be > 0");
  }
  if (!(motor_time_constant > 0)) {
    throw std::invalid_argument("motor time constant must be > 0");
  }
  if (!(max_motor_speed > 0)) {
    throw std::invalid_argument("max motor speed must be > 0");
  }
  if (!(physics_dt > 0)) throw std::invalid_argument("physics_dt must be > 0");
  if (motor_noise_std < 0) {
    throw std::invalid_argument("motor noise std must be >= 0");
  }
}

Vec3 euler_zyx(const Quat& q) {
  const Scalar w = q.w(), x = q.x(), y = q.y(), z = q.z();
  const Scalar roll = std::atan2(2.0 * (w * x + y * z), 1.0 - 2.0 * (x * x + y * y));
  const Scalar sinp = std::clamp(2.0 * (w * y - z * x), -1.0, 1.0);
  const Scalar pitch = std::asin(sinp);
  const Scalar yaw = std::atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z));
  return {roll, pitch, yaw};
}

Scalar hover_speed(const VehicleParams& params) {
  return std::sqrt(params.mass * params.gravity / (4.0 * params.thrust_coeff));
}

Vec4 motor_response(const Vec4& commanded, const Vec4& current, Scalar dt,
                    const VehicleParams& params, Rng& rng) {
  if (!commanded.allFinite() || !current.allFinite() || !std::isfinite(dt)) {
    throw NumericalError("motor_response: non-finite input");
  }
  if (!(dt > 0)) throw std::invalid_argument("motor_response: dt must be > 0");
  const Vec4 target = commanded.cwiseMax(0.0).cwiseMin(params.max_motor_speed);
  const Scalar blend = -std::expm1(-dt / params.motor_time_constant);
  Vec4 out = current + (target - current) * blend;
  if (params.motor_noise_std > 0) {
    std::normal_distribution<Scalar> noise(0.0, params.motor_noise_std);
    for (int i = 0; i < 4; ++i) out[i] += noise(rng);
  }
  return out.cwiseMax(0.0).cwiseMin(params.max_motor_speed);
}

RotorWrench rotor_wrench(const Vec4& motor_speeds, const VehicleParams& params) {
  const Vec4 sq = motor_speeds.cwiseAbs2();
  const Vec4 f = params.thrust_coeff * sq;
  const Scalar l = params.arm_length;
  RotorWrench w;
  w.thrust = f.sum();
  w.torque.x() = l * (f[1] - f[3]);
  w.torque.y() = l * (f[2] - f[0]);
  w.torque.z() = params.torque_coeff * (sq[0] - sq[1] + sq[2] - sq[3]);
  return w;
}

void compute_accelerations(const RigidBodyState& state,
                           const VehicleParams& params, Vec3* linear_accel,
                           Vec3* angular_accel) {
  const RotorWrench w = rotor_wrench(state.motor_speeds, params);
  const Vec3 thrust_world = state.orientation * Vec3(0.0, 0.0, w.thrust);
  const Vec3 drag = -params.linear_drag_coeff * state.velocity;
  *linear_accel = (thrust_world + drag) / params.mass;
  linear_accel->z() -= params.gravity;

  const Vec3& omega = state.angular_velocity;
  const Vec3 inertia_omega = params.inertia_diag.cwiseProduct(omega);
  const Vec3 net = w.torque - omega.cross(inertia_omega) -
                   params.angular_drag_coeff * omega;
  *angular_accel = net.cwiseQuotient(params.inertia_diag);
}

RigidBodyState step(const RigidBodyState& state, const Vec4& commanded,
                    const VehicleParams& params, Scalar dt, Rng& rng) {
  if (!(dt > 0)) throw std::invalid_argument("step: dt must be > 0");
  if (!commanded.allFinite()) throw NumericalError("step: non-finite command");
  const int substeps =
      std::max(1, static_cast<int>(std::lround(dt / params.physics_dt)));
  const Scalar h = dt / substeps;

  RigidBodyState s = state;
  for (int k = 0; k < substeps; ++k) {
    s.motor_speeds = motor_response(commanded, s.motor_speeds, h, params, rng);
    compute_accelerations(s, params, &s.linear_accel, &s.angular_accel);

    // Velocity first, then position from the mean of old and new velocity.
    const Vec3 v_old = s.velocity;
    s.velocity += s.linear_accel * h;
    s.position += 0.5 * (v_old + s.velocity) * h;

    s.angular_velocity += s.angular_accel * h;
    s.orientation = s.orientation * body_rate_increment(s.angular_velocity, h);
    s.orientation.normalize();
    s.time += h;
  }
  check_state(s);
  return s;
}

Scalar mechanical_energy(const RigidBodyState& state,
                         const VehicleParams& params) {
  const Scalar kinetic = 0.5 * params.mass * state.velocity.squaredNorm();
  const Scalar rotational =
      0.5 * state.angular_velocity.dot(
                params.inertia_diag.cwiseProduct(state.angular_velocity));
  const Scalar potential = params.mass * params.gravity * state.position.z();
  return kinetic + rotational + potential;
}

}  // namespace hcmflight
