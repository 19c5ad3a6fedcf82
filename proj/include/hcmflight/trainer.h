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

#ifndef HCMFLIGHT_TRAINER_H_
#define HCMFLIGHT_TRAINER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hcmflight/actor_critic.h"
#include "hcmflight/checkpoint.h"
#include "hcmflight/config.h"
#include "hcmflight/env.h"
#include "hcmflight/hcm.h"
#include "hcmflight/icm.h"
#include "hcmflight/metrics.h"
#include "hcmflight/ppo.h"
#include "hcmflight/visitation.h"

namespace hcmflight {

// Independent engine for one named stream of a run.
Rng make_rng(std::uint64_t seed, std::uint32_t stream);

// One training pipeline: collect a batch, assign curiosity, update the
// actor-critic, update the curiosity module, record metrics.
class Trainer {
 public:
  explicit Trainer(RunConfig config);

  // Runs one full batch and returns its metrics row. The batch's transitions
  // and visitation grid stay available until the next call.
  MetricsRow run_batch();

  const RunConfig& config() const { return config_; }
  const ActorCritic& nets() const { return nets_; }
  ActorCritic& nets() { return nets_; }
  const RolloutBuffer& buffer() const { return buffer_; }
  const VisitationGrid& batch_grid() const { return grid_; }
  int batches_done() const { return batch_index_; }
  const std::optional<IcmNets>& icm() const { return icm_; }
  const std::optional<CuriosityEnsemble>& hcm() const { return hcm_; }

  // Number of curiosity bundles used in the last batch (ppo_hcm only).
  int last_bundle_count() const { return last_bundle_count_; }

 private:
  struct Counters;
  void collect(Counters& counters);
  void assign_curiosity(MetricsRow& row, std::vector<SegmentBundle>& bundles);
  void train_curiosity(MetricsRow& row, const std::vector<SegmentBundle>& bundles);

  RunConfig config_;
  QuadrotorEnv env_;
  ActorCritic nets_;
  std::optional<IcmNets> icm_;
  std::optional<CuriosityEnsemble> hcm_;
  Rng env_rng_;
  Rng policy_rng_;
  Rng update_rng_;
  RolloutBuffer buffer_;
  VisitationGrid grid_;
  Observation current_obs_;
  std::int64_t flight_id_ = 0;
  int batch_index_ = 0;
  int last_bundle_count_ = 0;
};

struct TrainArtifacts {
  std::string metrics_path;
  std::vector<std::string> checkpoints;
  std::vector<std::string> grid_snapshots;  // CSV paths; a .pgm sits beside each
  int batches = 0;
};

// Runs config.total_batches batches, writing under config.out_dir:
//   config.txt, metrics.csv, grids/grid_NNNNN.{csv,pgm},
//   checkpoints/ckpt_NNNNN.{bin,txt}
// On a hard error a final checkpoint is written and the error is rethrown
// with the batch index.
TrainArtifacts train(const RunConfig& config);

Checkpoint make_checkpoint(const RunConfig& config, const ActorCritic& nets, int batch);

enum class FlightOutcome { kReachedGoal, kCrash, kObstacleHit, kOutOfBounds, kTimeout };
std::string to_string(FlightOutcome outcome);

// A flight that lasts until the timeout and ends within this distance of the
// goal counts as reaching it.
inline constexpr Scalar kGoalTolerance = 0.3;

struct FlightReport {
  int index = 0;
  FlightOutcome outcome = FlightOutcome::kTimeout;
  int steps = 0;
  Vec6 final_pose_error = Vec6::Zero();
  Scalar final_goal_distance = 0.0;
  Scalar min_obstacle_distance = 0.0;
  Scalar total_reward = 0.0;
  std::string trajectory_path;
};

struct EvaluationReport {
  std::vector<FlightReport> flights;

  int failed() const;  // crash, obstacle_hit or out_of_bounds
  std::string to_csv() const;
};

// Trajectory CSV header; one row per control step follows it.
std::string trajectory_header();

// Runs the deterministic policy (tanh of the mean action) for `episodes`
// flights. When `out_dir` is non-empty each flight's trajectory is written
// there as trajectory_NNN.csv.
EvaluationReport evaluate(const ActorCritic& nets, const RunConfig& config,
                          int episodes, std::uint64_t seed,
                          const std::string& out_dir);

// Loads a checkpoint written by train(); the stored config is used unless
// `config_override` is given, in which case its network shapes must match.
EvaluationReport evaluate_checkpoint(const std::string& checkpoint_path, int episodes,
                                     std::optional<std::uint64_t> seed,
                                     const std::optional<RunConfig>& config_override,
                                     const std::string& out_dir);

}  // namespace hcmflight

#endif  // HCMFLIGHT_TRAINER_H_
