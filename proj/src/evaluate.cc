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

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hcmflight/checkpoint.h"
#include "hcmflight/trainer.h"

namespace hcmflight {

namespace fs = std::filesystem;

std::string to_string(FlightOutcome outcome) {
  switch (outcome) {
    case FlightOutcome::kReachedGoal: return "reached_goal";
    case FlightOutcome::kCrash: return "crash";
    case FlightOutcome::kObstacleHit: return "obstacle_hit";
    case FlightOutcome::kOutOfBounds: return "out_of_bounds";
    case FlightOutcome::kTimeout: return "timeout";
  }
  return "unknown";
}

namespace {

std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

FlightOutcome outcome_of(TerminalCause cause, Scalar goal_distance) {
  switch (cause) {
    case TerminalCause::kCrash: return FlightOutcome::kCrash;
    case TerminalCause::kObstacleHit: return FlightOutcome::kObstacleHit;
    case TerminalCause::kOutOfBounds: return FlightOutcome::kOutOfBounds;
    default:
      return goal_distance < kGoalTolerance ? FlightOutcome::kReachedGoal
                                            : FlightOutcome::kTimeout;
  }
}

Scalar nearest_obstacle(const QuadrotorEnv& env) {
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (const Vec2& o : env.obstacles()) {
    best = std::min(best, (env.state().position.head<2>() - o).norm() -
                              env.config().obstacle_radius);
  }
  return best;
}

}  // namespace

int EvaluationReport::failed() const {
  int n = 0;
  for (const auto& f : flights) {
    if (f.outcome == FlightOutcome::kCrash || f.outcome == FlightOutcome::kObstacleHit ||
        f.outcome == FlightOutcome::kOutOfBounds) {
      ++n;
    }
  }
  return n;
}

std::string EvaluationReport::to_csv() const {
  std::ostringstream os;
  os << "flight,outcome,steps,err_x,err_y,err_z,err_roll,err_pitch,err_yaw,"
        "goal_distance,min_obstacle_distance,total_reward\n";
  for (const auto& f : flights) {
    os << f.index << ',' << to_string(f.outcome) << ',' << f.steps;
    for (int i = 0; i < 6; ++i) os << ',' << num(f.final_pose_error[i]);
    os << ',' << num(f.final_goal_distance) << ',' << num(f.min_obstacle_distance)
       << ',' << num(f.total_reward) << '\n';
  }
  return os.str();
}

std::string trajectory_header() {
  return "time,x,y,z,roll,pitch,yaw,m0,m1,m2,m3,r_ext,r_int,terminal_cause";
}

EvaluationReport evaluate(const ActorCritic& nets, const RunConfig& config,
                          int episodes, std::uint64_t seed,
                          const std::string& out_dir) {
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  if (!out_dir.empty()) fs::create_directories(out_dir);
  QuadrotorEnv env(config.env, config.vehicle);
  Rng rng = make_rng(seed, 10);
  EvaluationReport report;
  for (int e = 0; e < episodes; ++e) {
    FlightReport flight;
    flight.index = e;
    Observation obs = env.reset(rng);
    flight.min_obstacle_distance = nearest_obstacle(env);
    std::ofstream traj;
    if (!out_dir.empty()) {
      char name[32];
      std::snprintf(name, sizeof(name), "trajectory_%03d.csv", e);
      flight.trajectory_path = (fs::path(out_dir) / name).string();
      traj.open(flight.trajectory_path);
      if (!traj) throw std::runtime_error("cannot write " + flight.trajectory_path);
      traj << trajectory_header() << '\n';
    }
    StepResult res;
    do {
      const PolicyOutput out = forward_policy(nets.policy, obs);
      const Vec4 action = out.action_mean.array().tanh();
      res = env.step(action, rng);
      obs = res.observation;
      ++flight.steps;
      flight.total_reward += res.r_ext;
      flight.min_obstacle_distance =
          std::min(flight.min_obstacle_distance, nearest_obstacle(env));
      if (traj.is_open()) {
        const RigidBodyState& s = env.state();
        const Vec6 pose = pose_of(s);
        traj << num(flight.steps * config.env.control_dt);
        for (int i = 0; i < 6; ++i) traj << ',' << num(pose[i]);
        for (int i = 0; i < 4; ++i) traj << ',' << num(s.motor_speeds[i]);
        traj << ',' << num(res.r_ext) << ",0," << to_string(res.terminal_cause) << '\n';
      }
    } while (!res.terminal);
    flight.final_pose_error = res.pose_error;
    flight.final_goal_distance = res.goal_distance;
    flight.outcome = outcome_of(res.terminal_cause, res.goal_distance);
    report.flights.push_back(flight);
  }
  return report;
}

EvaluationReport evaluate_checkpoint(const std::string& checkpoint_path, int episodes,
                                     std::optional<std::uint64_t> seed,
                                     const std::optional<RunConfig>& config_override,
                                     const std::string& out_dir) {
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  RunConfig config;
  if (config_override) {
    config = *config_override;
  } else {
    auto it = ckpt.metadata.find("config");
    if (it == ckpt.metadata.end()) {
      throw std::runtime_error(checkpoint_path + ": checkpoint has no stored config");
    }
    config = parse_config(it->second);
  }
  ActorCritic nets = ActorCritic::zeros(config.policy_hidden);
  restore_actor_critic(ckpt, nets);
  return evaluate(nets, config, episodes, seed.value_or(config.seed), out_dir);
}

}  // namespace hcmflight
