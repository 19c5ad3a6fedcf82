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

#ifndef HCMFLIGHT_HCM_H_
#define HCMFLIGHT_HCM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "hcmflight/actor_critic.h"
#include "hcmflight/common.h"
#include "hcmflight/ppo.h"

namespace hcmflight {

struct HcmConfig {
  int segment_length = 50;  // n, control steps on each side of the anchor
  int stride = 25;
  int heads_per_type = 5;
  Scalar beta = 0.2;
  Scalar alpha_curiosity = 0.1;
  Scalar kappa = 0.9;
  Scalar lr = 1e-3;
  int hidden = 128;
  int epochs = 4;
  int minibatch_size = 64;

  void validate() const;
};

using Positions = Eigen::Matrix<Scalar, 3, Eigen::Dynamic>;

// Trajectory window around an anchor step t:
//   past      observations t-n .. t      (kObsDim x (n+1))
//   future    observations t .. t+n      (kObsDim x (n+1))
//   positions world positions t-n .. t+n (3 x (2n+1))
//   rewards   extrinsic rewards t .. t+n (n+1)
struct SegmentBundle {
  MatX past;
  MatX future;
  Positions positions;
  VecX rewards;
  int anchor = 0;
};

// Bundles at anchors n, n+stride, ... whose window [t-n, t+n] lies inside
// one flight (no terminal flag on steps t-n .. t+n-1).
std::vector<SegmentBundle> make_bundles(const RolloutBuffer& buffer, int n, int stride);

struct Waypoints {
  Vec3 wp1 = Vec3::Zero();
  Vec3 wp2 = Vec3::Zero();
  Vec3 wp3 = Vec3::Zero();

  Eigen::Vector<Scalar, 9> flat() const;
};

// Displacements from the window start to a quarter of the way in, to the
// anchor, and to the window end.
Waypoints f_wp(const Positions& window);

enum class HeadKind { kStatesStates, kStatesRewards };

// One curiosity sub-module: an inverse net predicting the waypoints and a
// forward net predicting the future segment (states or rewards).
struct CuriosityHead {
  HeadKind kind = HeadKind::kStatesStates;
  Mlp inverse;
  Mlp forward;
  AdamState inverse_adam;
  AdamState forward_adam;

  static CuriosityHead create(HeadKind kind, int segment_length, int hidden,
                              std::uint64_t seed);
};

struct HeadTerms {
  Scalar reward = 0.0;  // (1 - beta) l_inverse + beta l_forward
  Scalar l_inverse = 0.0;
  Scalar l_forward = 0.0;
};

// Column-stacked bundle tensors for batched head evaluation.
struct BundleBatch {
  MatX past;       // kObsDim (n+1) x B, column-major flatten of each segment
  MatX future;
  MatX waypoints;  // 9 x B
  MatX rewards;    // (n+1) x B

  static BundleBatch from(std::span<const SegmentBundle> bundles);
  Eigen::Index size() const { return past.cols(); }
};

// Per-bundle terms for one head over a batch (each column one bundle).
struct HeadBatchTerms {
  VecX reward;
  VecX l_inverse;
  VecX l_forward;
};
HeadBatchTerms head_terms(const CuriosityHead& head, const BundleBatch& batch,
                          Scalar beta);

// Batch-mean loss of one head and, optionally, its gradients.
HeadTerms head_loss(const CuriosityHead& head, const BundleBatch& batch,
                    Scalar beta, VecX* grad_inverse = nullptr,
                    VecX* grad_forward = nullptr);

HeadTerms head_reward_ss(const SegmentBundle& bundle, const CuriosityHead& head,
                         Scalar beta);
HeadTerms head_reward_sr(const SegmentBundle& bundle, const CuriosityHead& head,
                         Scalar beta);

struct CuriosityEnsemble {
  std::vector<CuriosityHead> ss_heads;
  std::vector<CuriosityHead> sr_heads;
  HcmConfig config;

  // Head i of each type is seeded from `seed` and its index, so heads differ
  // by initialization only.
  static CuriosityEnsemble create(const HcmConfig& config, std::uint64_t seed);
};

// alpha * mean over all heads of their curiosity reward.
Scalar ensemble_reward(const SegmentBundle& bundle, const CuriosityEnsemble& ensemble);
VecX ensemble_rewards(const BundleBatch& batch, const CuriosityEnsemble& ensemble);

// Adds kappa^x * r_curiosity to r_int at anchor +- x for x = 0..n, stopping
// at flight boundaries and buffer ends.
void distribute_trajectory(RolloutBuffer& buffer, int anchor, Scalar r_curiosity,
                           Scalar kappa, int n);

struct HcmUpdateStats {
  Scalar loss_ss = 0.0;   // mean over SS heads
  Scalar loss_sr = 0.0;   // mean over SR heads
  std::vector<HeadTerms> per_head;  // SS heads first, then SR heads
  int aborted_heads = 0;
};

// One Adam step per head on its own mixed loss over `batch`.
HcmUpdateStats hcm_update(const BundleBatch& batch, CuriosityEnsemble& ensemble,
                          Scalar lr);

}  // namespace hcmflight

#endif  // HCMFLIGHT_HCM_H_
