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

#ifndef HCMFLIGHT_ICM_H_
#define HCMFLIGHT_ICM_H_

#include <span>

#include "hcmflight/actor_critic.h"
#include "hcmflight/common.h"
#include "hcmflight/ppo.h"

namespace hcmflight {

struct IcmConfig {
  Scalar beta = 0.2;
  Scalar eta = 1.0;
  int hidden = 128;
  Scalar lr = 1e-3;
  int epochs = 4;
  int minibatch_size = 256;

  void validate() const;
};

// Single-transition curiosity. Features are the normalized observation
// itself, so phi(s) = s.
//   inverse: [s_t; s_t+1] -> a_t        forward: [s_t; a_t] -> s_t+1
struct IcmNets {
  Mlp inverse;
  Mlp forward;
  AdamState inverse_adam;
  AdamState forward_adam;
  Scalar beta = 0.2;
  Scalar eta = 1.0;

  static IcmNets create(const IcmConfig& config, Rng& rng);
};

// Column-stacked transitions: states and next_states are kObsDim x B,
// actions kActionDim x B (the squashed action the env received).
struct IcmBatch {
  MatX states;
  MatX actions;
  MatX next_states;

  static IcmBatch from(std::span<const Transition> transitions);
  Eigen::Index size() const { return states.cols(); }
};

// (eta / 2) * || f(s_t, a_t) - s_t+1 ||
Scalar icm_reward(const VecX& state, const Vec4& action, const VecX& next_state,
                  const IcmNets& nets);
VecX icm_rewards(const IcmBatch& batch, const IcmNets& nets);

struct IcmLosses {
  Scalar inverse = 0.0;  // mean of 1/2 ||a_hat - a||^2
  Scalar forward = 0.0;  // mean of 1/2 ||phi_hat - phi||^2
  Scalar total = 0.0;    // (1 - beta) inverse + beta forward
  bool aborted = false;
};

IcmLosses icm_loss(const IcmNets& nets, const IcmBatch& batch,
                   VecX* grad_inverse = nullptr, VecX* grad_forward = nullptr);

// One Adam step on the mixed loss. A net whose loss weight is zero is left
// untouched. A non-finite loss leaves both nets unchanged.
IcmLosses icm_update(const IcmBatch& batch, IcmNets& nets, Scalar lr);

}  // namespace hcmflight

#endif  // HCMFLIGHT_ICM_H_
