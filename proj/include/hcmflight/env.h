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

#ifndef HCMFLIGHT_ENV_H_
#define HCMFLIGHT_ENV_H_

#include <array>
#include <string>
#include <vector>

#include "hcmflight/common.h"
#include "hcmflight/dynamics.h"

namespace hcmflight {

using Vec2 = Eigen::Vector2<Scalar>;

inline constexpr int kOdometryDim = 18;
inline constexpr int kAuxDim = 14;
inline constexpr int kObsDim = kOdometryDim + kAuxDim;
inline constexpr int kActionDim = 4;
inline constexpr int kMaxObstacles = 3;

// Slot offsets inside the observation blocks. The layout is part of the
// checkpoint contract and must not change.
namespace obs_slot {
inline constexpr int kPosition = 0;
inline constexpr int kAttitude = 3;
inline constexpr int kVelocity = 6;
inline constexpr int kAngularVelocity = 9;
inline constexpr int kLinearAccel = 12;
inline constexpr int kAngularAccel = 15;
// aux block
inline constexpr int kPrevMotors = 0;
inline constexpr int kObstacles = 4;  // (dx, dy, dist) per obstacle
inline constexpr int kGoalDistance = 13;
}  // namespace obs_slot

struct EnvConfig {
  Vec3 goal_position = Vec3(0.0, 0.0, 1.5);
  Scalar goal_roll = 0.0;
  Scalar goal_pitch = 0.0;
  Vec3 bounds = Vec3(5.0, 5.0, 3.0);

  int obstacle_count = 3;
  Scalar obstacle_radius = 0.25;
  Scalar obstacle_height = 3.0;
  Scalar collision_margin = 0.15;
  // Extra horizontal clearance kept between an obstacle and both the spawn
  // point and the goal.
  Scalar obstacle_clearance = 0.2;

  Scalar alpha_p = 1.0;
  Scalar alpha_a = 0.3;
  Scalar alpha_flight = 1.0;
  Scalar alpha_yaw = -0.1;
  Scalar alpha_nu = -0.02;
  Scalar alpha_omega = -0.02;
  Scalar crash_reward = -10.0;
  Scalar crash_altitude = 0.05;

  int max_flight_steps = 1000;
  Scalar control_dt = 0.01;

  Vec3 spawn_position = Vec3(2.0, 2.0, 1.5);
  Scalar init_position_range = 1.0;
  Scalar init_attitude_range = 0.3;

  // Fixed normalization scales for the odometry block.
  Scalar velocity_scale = 5.0;
  Scalar angular_velocity_scale = 10.0;
  Scalar linear_accel_scale = 20.0;
  Scalar angular_accel_scale = 50.0;

  void validate() const;
};

struct Observation {
  Eigen::Vector<Scalar, kOdometryDim> odometry =
      Eigen::Vector<Scalar, kOdometryDim>::Zero();
  Eigen::Vector<Scalar, kAuxDim> aux = Eigen::Vector<Scalar, kAuxDim>::Zero();

  // odometry followed by aux.
  VecX flat() const;
};

enum class TerminalCause { kNone, kCrash, kObstacleHit, kOutOfBounds, kTimeout };

std::string to_string(TerminalCause cause);

struct StepResult {
  Observation observation;
  Scalar r_ext = 0.0;
  bool terminal = false;
  TerminalCause terminal_cause = TerminalCause::kNone;
  Vec6 pose_error = Vec6::Zero();  // |x|,|y|,|z|,|roll|,|pitch|,|yaw| errors
  Scalar goal_distance = 0.0;
  Scalar mean_obstacle_distance = 0.0;
};

// (x, y, z, roll, pitch, yaw) of a rigid body.
Vec6 pose_of(const RigidBodyState& state);

// Yaw that points from `position_xy` toward the world origin. At the origin
// itself the direction is undefined and `current_yaw` is returned.
Scalar desired_yaw(const Vec2& position_xy, Scalar current_yaw);

Scalar compute_flight_reward(const Vec6& pose, Scalar desired_yaw,
                             const EnvConfig& config);
Scalar compute_yaw_reward(Scalar current_yaw, Scalar desired_yaw);
Scalar compute_velocity_reward(const Vec3& velocity, const Vec3& angular_velocity,
                               const EnvConfig& config);

Observation assemble_observation(const RigidBodyState& state,
                                 const Vec4& prev_motors,
                                 const std::vector<Vec2>& obstacles,
                                 const Vec3& goal, const EnvConfig& config,
                                 const VehicleParams& vehicle);

// Uniform obstacle placement inside the axis-aligned rectangle spanned by
// `from` and `to`. Widens the rectangle by 10% after every 1000 rejected
// samples. `widenings`, when non-null, receives the number of widenings.
std::vector<Vec2> place_obstacles(const Vec2& from, const Vec2& to,
                                  const EnvConfig& config, Rng& rng,
                                  int* widenings = nullptr);

class QuadrotorEnv {
 public:
  QuadrotorEnv(EnvConfig config, VehicleParams vehicle);

  Observation reset(Rng& rng);

  // `action` components in [-1, 1] map affinely onto [0, max_motor_speed].
  StepResult step(const Vec4& action, Rng& rng);

  // Places the vehicle at an explicit state (testing and evaluation hooks).
  Observation set_state(const RigidBodyState& state,
                        std::vector<Vec2> obstacles);

  Vec4 action_to_motor_speeds(const Vec4& action) const;

  const RigidBodyState& state() const { return state_; }
  const std::vector<Vec2>& obstacles() const { return obstacles_; }
  const EnvConfig& config() const { return config_; }
  const VehicleParams& vehicle() const { return vehicle_; }
  int flight_steps() const { return flight_steps_; }
  bool needs_reset() const { return needs_reset_; }

 private:
  TerminalCause classify(const RigidBodyState& s) const;

  EnvConfig config_;
  VehicleParams vehicle_;
  RigidBodyState state_;
  Vec4 prev_motors_ = Vec4::Zero();
  std::vector<Vec2> obstacles_;
  int flight_steps_ = 0;
  bool needs_reset_ = true;
};

}  // namespace hcmflight

#endif  // HCMFLIGHT_ENV_H_
