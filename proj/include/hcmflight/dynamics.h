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

#ifndef HCMFLIGHT_DYNAMICS_H_
#define HCMFLIGHT_DYNAMICS_H_

#include "hcmflight/common.h"

namespace hcmflight {

// Nominal Hummingbird-class airframe. Rotors sit in a "+" layout:
//   0: +x (front)   1: +y (left)   2: -x (back)   3: -y (right)
// Rotors 0 and 2 produce a positive yaw reaction moment, 1 and 3 negative.
struct VehicleParams {
  Scalar mass = 0.68;
  Vec3 inertia_diag = Vec3(7.0e-3, 7.0e-3, 1.2e-2);
  Scalar arm_length = 0.17;
  Scalar thrust_coeff = 8.54858e-6;          // k_f, N s^2 / rad^2
  Scalar torque_coeff = 1.6e-2 * 8.54858e-6; // k_m, N m s^2 / rad^2
  Scalar motor_time_constant = 0.05;
  Scalar motor_noise_std = 5.0;
  Scalar linear_drag_coeff = 0.1;
  Scalar angular_drag_coeff = 1e-4;
  Scalar max_motor_speed = 838.0;
  Scalar gravity = 9.81;
  Scalar physics_dt = 1e-3;

  // Throws std::invalid_argument on a non-physical parameter set.
  void validate() const;
};

struct RigidBodyState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Quat orientation = Quat::Identity();  // world <- body
  Vec3 angular_velocity = Vec3::Zero(); // body frame
  Vec3 linear_accel = Vec3::Zero();     // world frame
  Vec3 angular_accel = Vec3::Zero();    // body frame
  Vec4 motor_speeds = Vec4::Zero();
  Scalar time = 0.0;
};

// Roll, pitch, yaw from a Z-Y-X (yaw-pitch-roll) decomposition.
Vec3 euler_zyx(const Quat& q);

Scalar hover_speed(const VehicleParams& params);

// First-order lag of the actual rotor speeds toward the (clamped) command,
// with additive Gaussian noise; result clamped to [0, max_motor_speed].
Vec4 motor_response(const Vec4& commanded, const Vec4& current, Scalar dt,
                    const VehicleParams& params, Rng& rng);

// Body-frame collective thrust (z) and torques for the given rotor speeds.
struct RotorWrench {
  Scalar thrust = 0.0;
  Vec3 torque = Vec3::Zero();
};
RotorWrench rotor_wrench(const Vec4& motor_speeds, const VehicleParams& params);

// Linear (world) and angular (body) accelerations for a state whose motors
// spin at state.motor_speeds.
void compute_accelerations(const RigidBodyState& state,
                           const VehicleParams& params, Vec3* linear_accel,
                           Vec3* angular_accel);

// Advances one control period `dt`, sub-stepped at params.physics_dt.
RigidBodyState step(const RigidBodyState& state, const Vec4& commanded,
                    const VehicleParams& params, Scalar dt, Rng& rng);

// Mechanical energy (kinetic + rotational + potential) of a state.
Scalar mechanical_energy(const RigidBodyState& state,
                         const VehicleParams& params);

}  // namespace hcmflight

#endif  // HCMFLIGHT_DYNAMICS_H_
