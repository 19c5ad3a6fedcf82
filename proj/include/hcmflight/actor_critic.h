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

#ifndef HCMFLIGHT_ACTOR_CRITIC_H_
#define HCMFLIGHT_ACTOR_CRITIC_H_

#include <span>
#include <vector>

#include "hcmflight/common.h"
#include "hcmflight/env.h"
#include "hcmflight/nn/adam.h"
#include "hcmflight/nn/gaussian.h"
#include "hcmflight/nn/mlp.h"

namespace hcmflight {

using Mlp = nn::Mlp<Scalar>;
using AdamState = nn::AdamState<Scalar>;
using AdamConfig = nn::AdamConfig<Scalar>;

inline constexpr Scalar kLogStdMin = -5.0;
inline constexpr Scalar kLogStdMax = 2.0;

// The odometry block enters the first layer; the auxiliary block joins the
// first layer's output before the second.
inline nn::MlpShape actor_critic_shape(int hidden, int output) {
  return {kOdometryDim, kAuxDim, hidden, hidden, output};
}

struct PolicyOutput {
  Vec4 action_mean = Vec4::Zero();
  Vec4 log_std = Vec4::Zero();
};

struct ValueHeads {
  Scalar v_ext = 0.0;
  Scalar v_int = 0.0;
};

// Gaussian policy with a state-independent learned log standard deviation.
struct GaussianPolicy {
  Mlp mean_net;
  Vec4 log_std = Vec4::Zero();
  AdamState mean_adam;
  AdamState log_std_adam;
};

struct ValueNet {
  Mlp net;
  AdamState adam;
};

struct ActorCritic {
  GaussianPolicy policy;
  ValueNet value_ext;
  ValueNet value_int;

  // Orthogonal hidden layers (gain 1); policy output gain 0.01, value output
  // gain 1; initial log_std = 0 (unit exploration noise).
  static ActorCritic create(int hidden, Rng& rng);
  // All parameters zero except log_std = 0.
  static ActorCritic zeros(int hidden);
};

// Column-stacked observation blocks.
struct ObservationBatch {
  MatX odometry;
  MatX aux;

  static ObservationBatch from(std::span<const Observation> observations);
  Eigen::Index size() const { return odometry.cols(); }
};

PolicyOutput forward_policy(const GaussianPolicy& policy, const Observation& obs);
ValueHeads forward_values(const ValueNet& ext, const ValueNet& intr,
                          const Observation& obs);
VecX forward_value_batch(const ValueNet& head, const ObservationBatch& batch);

nn::LogProbEntropy<Scalar> log_prob_and_entropy(const PolicyOutput& out,
                                                const Vec4& action);

}  // namespace hcmflight

#endif  // HCMFLIGHT_ACTOR_CRITIC_H_
