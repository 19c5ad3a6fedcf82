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

#include "hcmflight/actor_critic.h"

namespace hcmflight {

namespace {

ValueNet make_value(const nn::MlpShape& shape, Rng& rng) {
  ValueNet v{Mlp::orthogonal(shape, rng, 1.0, 1.0), AdamState()};
  v.adam = AdamState(v.net.num_params());
  return v;
}

}  // namespace

ActorCritic ActorCritic::create(int hidden, Rng& rng) {
  ActorCritic ac;
  ac.policy.mean_net =
      Mlp::orthogonal(actor_critic_shape(hidden, kActionDim), rng, 1.0, 0.01);
  ac.policy.mean_adam = AdamState(ac.policy.mean_net.num_params());
  ac.policy.log_std_adam = AdamState(kActionDim);
  ac.value_ext = make_value(actor_critic_shape(hidden, 1), rng);
  ac.value_int = make_value(actor_critic_shape(hidden, 1), rng);
  return ac;
}

ActorCritic ActorCritic::zeros(int hidden) {
  ActorCritic ac;
  ac.policy.mean_net = Mlp(actor_critic_shape(hidden, kActionDim));
  ac.policy.mean_adam = AdamState(ac.policy.mean_net.num_params());
  ac.policy.log_std_adam = AdamState(kActionDim);
  for (ValueNet* v : {&ac.value_ext, &ac.value_int}) {
    v->net = Mlp(actor_critic_shape(hidden, 1));
    v->adam = AdamState(v->net.num_params());
  }
  return ac;
}

ObservationBatch ObservationBatch::from(std::span<const Observation> observations) {
  ObservationBatch b;
  const Eigen::Index n = static_cast<Eigen::Index>(observations.size());
  b.odometry.resize(kOdometryDim, n);
  b.aux.resize(kAuxDim, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    b.odometry.col(i) = observations[i].odometry;
    b.aux.col(i) = observations[i].aux;
  }
  return b;
}

PolicyOutput forward_policy(const GaussianPolicy& policy, const Observation& obs) {
  PolicyOutput out;
  out.action_mean = policy.mean_net.forward(obs.odometry, obs.aux);
  out.log_std = policy.log_std;
  return out;
}

ValueHeads forward_values(const ValueNet& ext, const ValueNet& intr,
                          const Observation& obs) {
  return {ext.net.forward(obs.odometry, obs.aux)(0, 0),
          intr.net.forward(obs.odometry, obs.aux)(0, 0)};
}

VecX forward_value_batch(const ValueNet& head, const ObservationBatch& batch) {
  return head.net.forward(batch.odometry, batch.aux).row(0).transpose();
}

nn::LogProbEntropy<Scalar> log_prob_and_entropy(const PolicyOutput& out,
                                                const Vec4& action) {
  return nn::gaussian_log_prob_entropy<Scalar>(out.action_mean, out.log_std, action);
}

}  // namespace hcmflight
