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

#include "hcmflight/trainer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "hcmflight/checkpoint.h"

namespace hcmflight {

namespace fs = std::filesystem;

Rng make_rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), stream, 0x48434dU};
  return Rng(seq);
}

namespace {

bool is_failure(TerminalCause cause) {
  return cause == TerminalCause::kCrash || cause == TerminalCause::kObstacleHit ||
         cause == TerminalCause::kOutOfBounds;
}

std::string numbered(const std::string& stem, int index, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "_%05d", index);
  return stem + buf + ext;
}

std::vector<int> shuffled_indices(int n, Rng& rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  return idx;
}

// Checks that intrinsic rewards came from the source the algorithm names.
void verify_curiosity_wiring(Algorithm algorithm, const RolloutBuffer& buffer,
                             const std::vector<SegmentBundle>& bundles, int n,
                             std::size_t icm_assigned) {
  const auto& steps = buffer.steps;
  switch (algorithm) {
    case Algorithm::kPpo:
      for (const auto& s : steps) {
        if (s.r_int != 0.0) throw std::logic_error("ppo batch carries intrinsic reward");
      }
      break;
    case Algorithm::kPpoIcm:
      if (icm_assigned != steps.size()) {
        throw std::logic_error("ppo_icm must assign one reward per transition");
      }
      break;
    case Algorithm::kPpoHcm: {
      std::vector<char> reach(steps.size(), 0);
      for (const auto& b : bundles) {
        const int lo = std::max(0, b.anchor - n);
        const int hi = std::min<int>(steps.size() - 1, b.anchor + n);
        for (int i = lo; i <= hi; ++i) reach[i] = 1;
      }
      for (std::size_t i = 0; i < steps.size(); ++i) {
        if (!reach[i] && steps[i].r_int != 0.0) {
          throw std::logic_error("ppo_hcm reward outside every bundle window");
        }
      }
      break;
    }
  }
}

}  // namespace

struct Trainer::Counters {
  double r_ext = 0.0;
  double failed = 0.0;
  double flights = 0.0;
  Vec6 pose_error = Vec6::Zero();
  double goal_distance = 0.0;
  double obstacle_distance = 0.0;
};

Trainer::Trainer(RunConfig config)
    : config_(std::move(config)),
      env_(config_.env, config_.vehicle),
      env_rng_(make_rng(config_.seed, 0)),
      policy_rng_(make_rng(config_.seed, 1)),
      update_rng_(make_rng(config_.seed, 2)),
      grid_(config_.grid_rows, config_.grid_cols, config_.env.bounds.x(),
            config_.env.bounds.y()) {
  config_.validate();
  Rng init_rng = make_rng(config_.seed, 3);
  nets_ = ActorCritic::create(config_.policy_hidden, init_rng);
  if (config_.algorithm == Algorithm::kPpoIcm) {
    icm_ = IcmNets::create(config_.icm, init_rng);
  } else if (config_.algorithm == Algorithm::kPpoHcm) {
    hcm_ = CuriosityEnsemble::create(config_.hcm, init_rng());
  }
  current_obs_ = env_.reset(env_rng_);
}

void Trainer::collect(Counters& c) {
  buffer_ = RolloutBuffer{};
  buffer_.steps.reserve(config_.ppo.batch_size);
  grid_.clear();
  std::normal_distribution<Scalar> normal(0.0, 1.0);
  for (int t = 0; t < config_.ppo.batch_size; ++t) {
    Transition tr;
    tr.obs = current_obs_;
    tr.position = env_.state().position;
    tr.flight_id = flight_id_;
    const PolicyOutput out = forward_policy(nets_.policy, current_obs_);
    for (int i = 0; i < kActionDim; ++i) {
      tr.action[i] = out.action_mean[i] + std::exp(out.log_std[i]) * normal(policy_rng_);
    }
    tr.log_prob_old = log_prob_and_entropy(out, tr.action).log_prob;
    tr.env_action = tr.action.array().tanh();
    const StepResult res = env_.step(tr.env_action, env_rng_);
    tr.next_obs = res.observation;
    tr.r_ext = res.r_ext;
    tr.terminal = res.terminal;
    buffer_.steps.push_back(tr);
    grid_.add(tr.position.x(), tr.position.y());

    c.r_ext += res.r_ext;
    c.pose_error += res.pose_error;
    c.goal_distance += res.goal_distance;
    c.obstacle_distance += res.mean_obstacle_distance;
    if (res.terminal) {
      c.flights += 1.0;
      if (is_failure(res.terminal_cause)) c.failed += 1.0;
      current_obs_ = env_.reset(env_rng_);
      ++flight_id_;
    } else {
      current_obs_ = res.observation;
    }
  }

  std::vector<Observation> obs;
  obs.reserve(buffer_.steps.size() + 1);
  for (const auto& s : buffer_.steps) obs.push_back(s.obs);
  obs.push_back(current_obs_);
  const ObservationBatch batch = ObservationBatch::from(obs);
  const VecX v_ext = forward_value_batch(nets_.value_ext, batch);
  const VecX v_int = forward_value_batch(nets_.value_int, batch);
  for (std::size_t i = 0; i < buffer_.steps.size(); ++i) {
    buffer_.steps[i].v_ext = v_ext[i];
    buffer_.steps[i].v_int = v_int[i];
  }
  buffer_.last_v_ext = v_ext[v_ext.size() - 1];
  buffer_.last_v_int = v_int[v_int.size() - 1];
}

void Trainer::assign_curiosity(MetricsRow& row, std::vector<SegmentBundle>& bundles) {
  std::size_t icm_assigned = 0;
  if (icm_) {
    const IcmBatch batch = IcmBatch::from(buffer_.steps);
    const VecX r = icm_rewards(batch, *icm_);
    for (Eigen::Index i = 0; i < r.size(); ++i) buffer_.steps[i].r_int = r[i];
    icm_assigned = static_cast<std::size_t>(r.size());
  }
  if (hcm_) {
    const int n = config_.hcm.segment_length;
    bundles = make_bundles(buffer_, n, config_.hcm.stride);
    last_bundle_count_ = static_cast<int>(bundles.size());
    row.hcm_bundles = static_cast<double>(bundles.size());
    if (!bundles.empty()) {
      const VecX r = ensemble_rewards(BundleBatch::from(bundles), *hcm_);
      row.hcm_mean_curiosity = r.mean();
      for (std::size_t b = 0; b < bundles.size(); ++b) {
        distribute_trajectory(buffer_, bundles[b].anchor, r[b], config_.hcm.kappa, n);
      }
    }
  }
  verify_curiosity_wiring(config_.algorithm, buffer_, bundles,
                          config_.hcm.segment_length, icm_assigned);
  double sum = 0.0;
  for (const auto& s : buffer_.steps) sum += s.r_int;
  row.mean_r_int = sum / buffer_.steps.size();
}

void Trainer::train_curiosity(MetricsRow& row, const std::vector<SegmentBundle>& bundles) {
  if (icm_) {
    const int n = static_cast<int>(buffer_.steps.size());
    const int mb = std::min(config_.icm.minibatch_size, n);
    double inv = 0.0, fwd = 0.0;
    int count = 0;
    std::vector<Transition> chunk;
    for (int epoch = 0; epoch < config_.icm.epochs; ++epoch) {
      const auto idx = shuffled_indices(n, update_rng_);
      for (int start = 0; start + mb <= n; start += mb) {
        chunk.clear();
        for (int k = start; k < start + mb; ++k) chunk.push_back(buffer_.steps[idx[k]]);
        const IcmLosses l = icm_update(IcmBatch::from(chunk), *icm_, config_.icm.lr);
        if (l.aborted) {
          std::clog << "icm update skipped: non-finite loss\n";
          continue;
        }
        inv += l.inverse;
        fwd += l.forward;
        ++count;
      }
    }
    if (count > 0) {
      row.icm_loss_inverse = inv / count;
      row.icm_loss_forward = fwd / count;
    }
  }
  if (hcm_ && !bundles.empty()) {
    const int n = static_cast<int>(bundles.size());
    const int mb = std::min(config_.hcm.minibatch_size, n);
    double ss = 0.0, sr = 0.0;
    int count = 0;
    std::vector<SegmentBundle> chunk;
    for (int epoch = 0; epoch < config_.hcm.epochs; ++epoch) {
      const auto idx = shuffled_indices(n, update_rng_);
      for (int start = 0; start + mb <= n; start += mb) {
        chunk.clear();
        for (int k = start; k < start + mb; ++k) chunk.push_back(bundles[idx[k]]);
        const HcmUpdateStats s = hcm_update(BundleBatch::from(chunk), *hcm_, config_.hcm.lr);
        if (s.aborted_heads > 0) {
          std::clog << "hcm update skipped " << s.aborted_heads << " head(s)\n";
        }
        ss += s.loss_ss;
        sr += s.loss_sr;
        ++count;
      }
    }
    if (count > 0) {
      row.hcm_loss_ss = ss / count;
      row.hcm_loss_sr = sr / count;
    }
  }
}

MetricsRow Trainer::run_batch() {
  MetricsRow row;
  row.batch = batch_index_;
  Counters c;
  collect(c);
  const double steps = static_cast<double>(buffer_.steps.size());
  row.mean_r_ext = c.r_ext / steps;
  row.failed_flights = c.failed;
  row.flights = c.flights;
  row.err_x = c.pose_error[0] / steps;
  row.err_y = c.pose_error[1] / steps;
  row.err_z = c.pose_error[2] / steps;
  row.err_roll = c.pose_error[3] / steps;
  row.err_pitch = c.pose_error[4] / steps;
  row.err_yaw = c.pose_error[5] / steps;
  row.goal_distance = c.goal_distance / steps;
  row.obstacle_distance = c.obstacle_distance / steps;

  std::vector<SegmentBundle> bundles;
  assign_curiosity(row, bundles);
  compute_advantages(buffer_, config_.ppo);

  const UpdateStats u = ppo_update(buffer_, nets_, config_.ppo, update_rng_);
  if (u.aborted) {
    throw NumericalError("ppo update aborted: " + u.abort_reason);
  }
  row.policy_loss = u.policy_loss;
  row.value_loss_ext = u.value_loss_ext;
  row.value_loss_int = u.value_loss_int;
  row.entropy = u.entropy;
  row.mean_ratio = u.mean_ratio;
  row.clip_fraction = u.clip_fraction;

  train_curiosity(row, bundles);
  ++batch_index_;
  return row;
}

Checkpoint make_checkpoint(const RunConfig& config, const ActorCritic& nets, int batch) {
  Checkpoint ckpt;
  ckpt.step = batch;
  ckpt.metadata["algorithm"] = to_string(config.algorithm);
  ckpt.metadata["config"] = to_text(config);
  ckpt.metadata["format"] = "hcmflight-actor-critic";
  store_actor_critic(nets, ckpt);
  return ckpt;
}

namespace {

std::string write_checkpoint(const std::string& dir, const RunConfig& config,
                             const ActorCritic& nets, int batch) {
  const std::string stem = (fs::path(dir) / "ckpt").string();
  const std::string bin = numbered(stem, batch, ".bin");
  const Checkpoint ckpt = make_checkpoint(config, nets, batch);
  save_checkpoint(bin, ckpt);
  std::ofstream(numbered(stem, batch, ".txt")) << shape_summary(ckpt);
  return bin;
}

}  // namespace

TrainArtifacts train(const RunConfig& config) {
  config.validate();
  const fs::path out(config.out_dir);
  fs::create_directories(out / "grids");
  fs::create_directories(out / "checkpoints");
  std::ofstream(out / "config.txt") << to_text(config);

  TrainArtifacts artifacts;
  artifacts.metrics_path = (out / "metrics.csv").string();
  MetricsWriter metrics(artifacts.metrics_path);
  Trainer trainer(config);
  const std::string ckpt_dir = (out / "checkpoints").string();
  int last_saved = -1;

  for (int b = 0; b < config.total_batches; ++b) {
    try {
      const MetricsRow row = trainer.run_batch();
      metrics.append(row);
      const std::string stem = (out / "grids" / "grid").string();
      const std::string csv = numbered(stem, b, ".csv");
      std::ofstream(csv) << trainer.batch_grid().to_csv();
      write_pgm(numbered(stem, b, ".pgm"), render_grid(trainer.batch_grid()));
      artifacts.grid_snapshots.push_back(csv);
      artifacts.batches = b + 1;
      if ((b + 1) % config.checkpoint_interval == 0) {
        artifacts.checkpoints.push_back(
            write_checkpoint(ckpt_dir, config, trainer.nets(), b + 1));
        last_saved = b + 1;
      }
    } catch (const std::exception& e) {
      try {
        artifacts.checkpoints.push_back(
            write_checkpoint(ckpt_dir, config, trainer.nets(), b));
      } catch (const std::exception& inner) {
        std::clog << "final checkpoint failed: " << inner.what() << "\n";
      }
      throw std::runtime_error("batch " + std::to_string(b) + ": " + e.what());
    }
  }
  if (last_saved != config.total_batches) {
    artifacts.checkpoints.push_back(
        write_checkpoint(ckpt_dir, config, trainer.nets(), config.total_batches));
  }
  return artifacts;
}

}  // namespace hcmflight
