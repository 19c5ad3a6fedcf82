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

#include "hcmflight/env.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace hcmflight {

void EnvConfig::validate() const {
  if (!(bounds.array() > 0).all()) {
    throw std::invalid_argument("env bounds must be > 0");
  }
  if (obstacle_count < 0 || obstacle_count > kMaxObstacles) {
    throw std::invalid_argument("env obstacle_count must be in [0, 3]");
  }
  if (max_flight_steps <= 0) {
    throw std::invalid_argument("env max_flight_steps must be > 0");
  }
  if (!(control_dt > 0)) throw std::invalid_argument("env control_dt must be > 0");
  if (obstacle_radius < 0 || collision_margin < 0 || init_position_range < 0 ||
      init_attitude_range < 0) {
    throw std::invalid_argument("env radii and ranges must be >= 0");
  }
}

VecX Observation::flat() const {
  VecX out(kObsDim);
  out << odometry, aux;
  return out;
}

std::string to_string(TerminalCause cause) {
  switch (cause) {
    case TerminalCause::kNone: return "none";
    case TerminalCause::kCrash: return "crash";
    case TerminalCause::kObstacleHit: return "obstacle_hit";
    case TerminalCause::kOutOfBounds: return "out_of_bounds";
    case TerminalCause::kTimeout: return "timeout";
  }
  return "unknown";
}

Vec6 pose_of(const RigidBodyState& state) {
  Vec6 pose;
  pose << state.position, euler_zyx(state.orientation);
  return pose;
}

Scalar desired_yaw(const Vec2& position_xy, Scalar current_yaw) {
  if (position_xy.x() == 0.0 && position_xy.y() == 0.0) return current_yaw;
  return std::atan2(0.0 - position_xy.y(), 0.0 - position_xy.x());
}

Scalar compute_flight_reward(const Vec6& pose, Scalar desired_yaw,
                             const EnvConfig& config) {
  Scalar position_term = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    const Scalar error = std::abs(config.goal_position[axis] - pose[axis]);
    const Scalar limit = config.bounds[axis];
    position_term += error > 0.5 * limit ? -1.0 : 1.0 - error / limit;
  }
  const Scalar attitude_error = std::abs(config.goal_roll - pose[3]) +
                                std::abs(config.goal_pitch - pose[4]) +
                                std::abs(wrap_angle(desired_yaw - pose[5]));
  return config.alpha_p * position_term - config.alpha_a * attitude_error;
}

Scalar compute_yaw_reward(Scalar current_yaw, Scalar desired_yaw) {
  return std::abs(wrap_angle(desired_yaw - current_yaw));
}

Scalar compute_velocity_reward(const Vec3& velocity, const Vec3& angular_velocity,
                               const EnvConfig& config) {
  return config.alpha_nu * velocity.norm() +
         config.alpha_omega * angular_velocity.norm();
}

Observation assemble_observation(const RigidBodyState& state,
                                 const Vec4& prev_motors,
                                 const std::vector<Vec2>& obstacles,
                                 const Vec3& goal, const EnvConfig& config,
                                 const VehicleParams& vehicle) {
  using namespace obs_slot;
  Observation obs;
  auto& odo = obs.odometry;
  odo.segment<3>(kPosition) = state.position.cwiseQuotient(config.bounds);
  odo.segment<3>(kAttitude) = euler_zyx(state.orientation) / kPi;
  odo.segment<3>(kVelocity) = state.velocity / config.velocity_scale;
  odo.segment<3>(kAngularVelocity) =
      state.angular_velocity / config.angular_velocity_scale;
  odo.segment<3>(kLinearAccel) = state.linear_accel / config.linear_accel_scale;
  odo.segment<3>(kAngularAccel) =
      state.angular_accel / config.angular_accel_scale;

  const Scalar horizontal_scale = std::max(config.bounds.x(), config.bounds.y());
  auto& aux = obs.aux;
  aux.segment<4>(kPrevMotors) = prev_motors / vehicle.max_motor_speed;
  const Vec2 xy = state.position.head<2>();
  const int count = std::min<int>(kMaxObstacles, obstacles.size());
  for (int i = 0; i < count; ++i) {
    const Vec2 delta = obstacles[i] - xy;
    aux.segment<3>(kObstacles + 3 * i) =
        Vec3(delta.x(), delta.y(), delta.norm()) / horizontal_scale;
  }
  aux[kGoalDistance] = (goal.head<2>() - xy).norm() / horizontal_scale;

  if (!obs.odometry.allFinite() || !obs.aux.allFinite()) {
    throw NumericalError("assemble_observation: non-finite observation");
  }
  return obs;
}

std::vector<Vec2> place_obstacles(const Vec2& from, const Vec2& to,
                                  const EnvConfig& config, Rng& rng,
                                  int* widenings) {
  constexpr int kSamplesPerAttempt = 1000;
  constexpr int kMaxWidenings = 200;
  const Scalar r = config.obstacle_radius;
  const Scalar keep_out = r + config.collision_margin + config.obstacle_clearance;
  Vec2 lo = from.cwiseMin(to);
  Vec2 hi = from.cwiseMax(to);
  if (widenings) *widenings = 0;

  for (int widen = 0; widen <= kMaxWidenings; ++widen) {
    std::uniform_real_distribution<Scalar> ux(lo.x(), hi.x());
    std::uniform_real_distribution<Scalar> uy(lo.y(), hi.y());
    std::vector<Vec2> placed;
    for (int sample = 0; sample < kSamplesPerAttempt &&
                         static_cast<int>(placed.size()) < config.obstacle_count;
         ++sample) {
      const Vec2 c(ux(rng), uy(rng));
      bool ok = (c - from).norm() >= keep_out && (c - to).norm() >= keep_out;
      for (const Vec2& p : placed) ok = ok && (c - p).norm() >= 2.0 * r;
      if (ok) placed.push_back(c);
    }
    if (static_cast<int>(placed.size()) == config.obstacle_count) return placed;

    const Vec2 half = 0.5 * (hi - lo);
    const Scalar grow = 0.1 * std::max({half.x(), half.y(), r});
    lo.array() -= grow;
    hi.array() += grow;
    if (widenings) ++*widenings;
    std::clog << "[env] obstacle placement failed; widening corridor to ["
              << lo.transpose() << "] x [" << hi.transpose() << "]\n";
  }
  throw std::runtime_error("obstacle placement failed after corridor widening");
}

QuadrotorEnv::QuadrotorEnv(EnvConfig config, VehicleParams vehicle)
    : config_(std::move(config)), vehicle_(std::move(vehicle)) {
  config_.validate();
  vehicle_.validate();
}

Vec4 QuadrotorEnv::action_to_motor_speeds(const Vec4& action) const {
  const Vec4 a = action.cwiseMax(-1.0).cwiseMin(1.0);
  return (a.array() + 1.0) * (0.5 * vehicle_.max_motor_speed);
}

Observation QuadrotorEnv::reset(Rng& rng) {
  std::uniform_real_distribution<Scalar> unit(-1.0, 1.0);
  RigidBodyState s;
  for (int i = 0; i < 3; ++i) {
    s.position[i] = config_.spawn_position[i] +
                    config_.init_position_range * unit(rng);
  }
  Vec3 attitude;
  for (int i = 0; i < 3; ++i) attitude[i] = config_.init_attitude_range * unit(rng);
  s.orientation = Eigen::AngleAxis<Scalar>(attitude.z(), Vec3::UnitZ()) *
                  Eigen::AngleAxis<Scalar>(attitude.y(), Vec3::UnitY()) *
                  Eigen::AngleAxis<Scalar>(attitude.x(), Vec3::UnitX());
  s.motor_speeds = Vec4::Constant(hover_speed(vehicle_));

  auto obstacles = place_obstacles(s.position.head<2>(),
                                   config_.goal_position.head<2>(), config_, rng);
  return set_state(s, std::move(obstacles));
}

Observation QuadrotorEnv::set_state(const RigidBodyState& state,
                                    std::vector<Vec2> obstacles) {
  state_ = state;
  obstacles_ = std::move(obstacles);
  prev_motors_ = state.motor_speeds;
  flight_steps_ = 0;
  needs_reset_ = false;
  return assemble_observation(state_, prev_motors_, obstacles_,
                              config_.goal_position, config_, vehicle_);
}

TerminalCause QuadrotorEnv::classify(const RigidBodyState& s) const {
  const Scalar hit_radius = config_.obstacle_radius + config_.collision_margin;
  for (const Vec2& o : obstacles_) {
    if ((s.position.head<2>() - o).norm() < hit_radius &&
        s.position.z() < config_.obstacle_height) {
      return TerminalCause::kObstacleHit;
    }
  }
  const Vec3 euler = euler_zyx(s.orientation);
  const bool on_ground =
      s.position.z() < config_.crash_altitude && s.velocity.z() <= 0.0;
  const bool flipped = std::abs(euler.x()) > 0.5 * kPi ||
                       std::abs(euler.y()) > 0.5 * kPi;
  if (on_ground || flipped) return TerminalCause::kCrash;
  if (std::abs(s.position.x()) > config_.bounds.x() ||
      std::abs(s.position.y()) > config_.bounds.y() ||
      s.position.z() > config_.bounds.z()) {
    return TerminalCause::kOutOfBounds;
  }
  if (flight_steps_ >= config_.max_flight_steps) return TerminalCause::kTimeout;
  return TerminalCause::kNone;
}

StepResult QuadrotorEnv::step(const Vec4& action, Rng& rng) {
  if (needs_reset_) {
    throw std::logic_error("QuadrotorEnv::step called after terminal without reset");
  }
  if (!action.allFinite()) throw NumericalError("QuadrotorEnv::step: non-finite action");

  const Vec4 command = action_to_motor_speeds(action);
  state_ = hcmflight::step(state_, command, vehicle_, config_.control_dt, rng);
  ++flight_steps_;

  prev_motors_ = command;
  StepResult result;
  result.observation = assemble_observation(state_, prev_motors_, obstacles_,
                                            config_.goal_position, config_,
                                            vehicle_);

  const Vec6 pose = pose_of(state_);
  const Scalar yaw_d = desired_yaw(state_.position.head<2>(), pose[5]);
  result.terminal_cause = classify(state_);
  result.terminal = result.terminal_cause != TerminalCause::kNone;
  if (result.terminal_cause == TerminalCause::kCrash ||
      result.terminal_cause == TerminalCause::kObstacleHit) {
    result.r_ext = config_.crash_reward;
  } else {
    result.r_ext =
        config_.alpha_flight * compute_flight_reward(pose, yaw_d, config_) +
        config_.alpha_yaw * compute_yaw_reward(pose[5], yaw_d) +
        compute_velocity_reward(state_.velocity, state_.angular_velocity, config_);
  }

  result.pose_error << (pose.head<3>() - config_.goal_position).cwiseAbs(),
      std::abs(pose[3] - config_.goal_roll), std::abs(pose[4] - config_.goal_pitch),
      std::abs(wrap_angle(yaw_d - pose[5]));
  result.goal_distance = (state_.position - config_.goal_position).norm();
  if (!obstacles_.empty()) {
    Scalar sum = 0.0;
    for (const Vec2& o : obstacles_) sum += (state_.position.head<2>() - o).norm();
    result.mean_obstacle_distance = sum / obstacles_.size();
  }
  needs_reset_ = result.terminal;
  return result;
}

}  // namespace hcmflight
