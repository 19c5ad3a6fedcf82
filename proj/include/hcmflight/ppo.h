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

#ifndef HCMFLIGHT_PPO_H_
#define HCMFLIGHT_PPO_H_

#include <cstdint>
#include <string>
#include <vector>

#include "hcmflight/actor_critic.h"
#include "hcmflight/common.h"
#include "hcmflight/env.h"

namespace hcmflight {

struct PpoConfig {
  int batch_size = 16384;
  Scalar gamma = 0.99;
  Scalar lambda = 0.95;
  Scalar clip_epsilon = 0.2;
  Scalar value_coeff = 0.5;    // c1, applied to both value heads
  Scalar entropy_coeff = 0.01; // c2
  int epochs = 10;
  int minibatch_size = 2048;
  Scalar lr_policy = 3e-4;
  Scalar lr_value_ext = 1e-3;
  Scalar lr_value_int = 3e-4;
  bool standard_td = false;
  bool normalize_advantages = true;

  void validate() const;
};

struct Transition {
  Observation obs;
  Observation next_obs;   // observation actually reached, before any reset
  Vec3 position = Vec3::Zero();  // world position at obs, meters
  Vec4 action = Vec4::Zero();     // pre-squash Gaussian sample
  Vec4 env_action = Vec4::Zero(); // tanh(action), what the env received
  Scalar log_prob_old = 0.0;
  Scalar r_ext = 0.0;
  Scalar r_int = 0.0;
  Scalar v_ext = 0.0;
  Scalar v_int = 0.0;
  bool terminal = false;
  std::int64_t flight_id = 0;
};

struct RolloutBuffer {
  std::vector<Transition> steps;
  // Bootstrap values of the observation following the last step.
  Scalar last_v_ext = 0.0;
  Scalar last_v_int = 0.0;

  VecX advantages;      // combined stream, drives the policy
  VecX advantages_ext;
  VecX advantages_int;
  VecX targets_ext;     // advantages_ext + v_ext
  VecX targets_int;     // advantages_int + v_int

  std::vector<bool> terminals() const;
};

// delta_t = r_t + gamma V_{t+1} (1 - terminal_t) - V_t, accumulated with
// (gamma lambda) and cut at terminals. `values` has one more entry than
// `rewards`.
VecX compute_gae(const VecX& rewards, const VecX& values,
                 const std::vector<bool>& terminals, Scalar gamma, Scalar lambda);

// Exponentially weighted accumulation of precomputed residuals.
VecX accumulate_gae(const VecX& deltas, const std::vector<bool>& terminals,
                    Scalar gamma, Scalar lambda);

// Residual over both reward streams. The default form discounts both value
// differences; `standard_td` uses r + gamma V(t+1) - V(t) on the summed heads.
Scalar combined_delta(Scalar r_ext, Scalar r_int, Scalar v_ext_t,
                      Scalar v_ext_t1, Scalar v_int_t, Scalar v_int_t1,
                      Scalar gamma, bool standard_td = false);

// min(r A, clip(r, 1 - eps, 1 + eps) A) with r = exp(new - old).
Scalar clipped_surrogate(Scalar log_prob_new, Scalar log_prob_old,
                         Scalar advantage, Scalar epsilon);

// Fills every advantage/target array of the buffer.
void compute_advantages(RolloutBuffer& buffer, const PpoConfig& config);

// Tensors for one minibatch of the update.
struct Minibatch {
  ObservationBatch obs;
  MatX actions;       // 4 x B, pre-squash
  VecX log_prob_old;
  VecX advantages;
  VecX targets_ext;
  VecX targets_int;

  static Minibatch gather(const RolloutBuffer& buffer, const VecX& advantages,
                          std::span<const int> indices);
};

struct PolicyLossTerms {
  Scalar loss = 0.0;       // -surrogate - c2 * entropy
  Scalar surrogate = 0.0;
  Scalar entropy = 0.0;
  Scalar mean_ratio = 0.0;
  Scalar clip_fraction = 0.0;
};

// Policy loss and, when requested, its gradients.
PolicyLossTerms policy_loss(const GaussianPolicy& policy, const Minibatch& batch,
                            Scalar clip_epsilon, Scalar entropy_coeff,
                            VecX* grad_mean_net = nullptr,
                            Vec4* grad_log_std = nullptr);

// Mean squared error of a value head against `targets`.
Scalar value_loss(const ValueNet& head, const ObservationBatch& obs,
                  const VecX& targets, VecX* grad = nullptr);

struct UpdateStats {
  Scalar policy_loss = 0.0;
  Scalar value_loss_ext = 0.0;
  Scalar value_loss_int = 0.0;
  Scalar entropy = 0.0;
  Scalar mean_ratio = 0.0;
  Scalar clip_fraction = 0.0;
  Scalar total_loss = 0.0;
  // Total loss of the first minibatch, evaluated before any parameter change.
  Scalar initial_total_loss = 0.0;
  int minibatches = 0;
  bool aborted = false;
  std::string abort_reason;
};

// Clipped-surrogate PPO over `epochs` shuffled passes. Requires
// compute_advantages to have run. On a non-finite loss the networks are
// restored to their pre-update state and the stats are marked aborted.
UpdateStats ppo_update(const RolloutBuffer& buffer, ActorCritic& nets,
                       const PpoConfig& config, Rng& rng);

}  // namespace hcmflight

#endif  // HCMFLIGHT_PPO_H_
