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

#include "hcmflight/icm.h"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace hcmflight {

void IcmConfig::validate() const {
  if (!(beta >= 0 && beta <= 1)) throw std::invalid_argument("icm.beta must be in [0, 1]");
  if (!(eta > 0)) throw std::invalid_argument("icm.eta must be > 0");
  if (hidden <= 0 || epochs <= 0 || minibatch_size <= 0) {
    throw std::invalid_argument("icm sizes must be > 0");
  }
}

IcmNets IcmNets::create(const IcmConfig& config, Rng& rng) {
  IcmNets nets;
  const int h = config.hidden;
  nets.inverse = Mlp::orthogonal({2 * kObsDim, 0, h, h, kActionDim}, rng, 1.0, 1.0);
  nets.forward = Mlp::orthogonal({kObsDim + kActionDim, 0, h, h, kObsDim}, rng, 1.0, 1.0);
  nets.inverse_adam = AdamState(nets.inverse.num_params());
  nets.forward_adam = AdamState(nets.forward.num_params());
  nets.beta = config.beta;
  nets.eta = config.eta;
  return nets;
}

IcmBatch IcmBatch::from(std::span<const Transition> transitions) {
  const Eigen::Index n = static_cast<Eigen::Index>(transitions.size());
  IcmBatch b;
  b.states.resize(kObsDim, n);
  b.actions.resize(kActionDim, n);
  b.next_states.resize(kObsDim, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    b.states.col(i) = transitions[i].obs.flat();
    b.actions.col(i) = transitions[i].env_action;
    b.next_states.col(i) = transitions[i].next_obs.flat();
  }
  return b;
}

namespace {

MatX stack(const MatX& top, const MatX& bottom) {
  MatX out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

}  // namespace

VecX icm_rewards(const IcmBatch& batch, const IcmNets& nets) {
  const MatX predicted = nets.forward.forward(stack(batch.states, batch.actions));
  return 0.5 * nets.eta * (predicted - batch.next_states).colwise().norm().transpose();
}

Scalar icm_reward(const VecX& state, const Vec4& action, const VecX& next_state,
                  const IcmNets& nets) {
  IcmBatch b{state, action, next_state};
  return icm_rewards(b, nets)[0];
}

IcmLosses icm_loss(const IcmNets& nets, const IcmBatch& batch, VecX* grad_inverse,
                   VecX* grad_forward) {
  const Scalar n = static_cast<Scalar>(batch.size());
  Mlp::Cache inv_cache, fwd_cache;
  const MatX a_hat = nets.inverse.forward(stack(batch.states, batch.next_states),
                                          MatX(0, batch.size()),
                                          grad_inverse ? &inv_cache : nullptr);
  const MatX s_hat = nets.forward.forward(stack(batch.states, batch.actions),
                                          MatX(0, batch.size()),
                                          grad_forward ? &fwd_cache : nullptr);
  const MatX inv_err = a_hat - batch.actions;
  const MatX fwd_err = s_hat - batch.next_states;

  IcmLosses l;
  l.inverse = 0.5 * inv_err.squaredNorm() / n;
  l.forward = 0.5 * fwd_err.squaredNorm() / n;
  l.total = (1.0 - nets.beta) * l.inverse + nets.beta * l.forward;
  if (grad_inverse) {
    *grad_inverse = nets.inverse.backward(inv_cache, ((1.0 - nets.beta) / n) * inv_err);
  }
  if (grad_forward) {
    *grad_forward = nets.forward.backward(fwd_cache, (nets.beta / n) * fwd_err);
  }
  return l;
}

IcmLosses icm_update(const IcmBatch& batch, IcmNets& nets, Scalar lr) {
  if (batch.size() == 0) throw std::invalid_argument("icm_update: empty batch");
  VecX g_inv, g_fwd;
  IcmLosses l;
  try {
    l = icm_loss(nets, batch, &g_inv, &g_fwd);
  } catch (const NumericalError&) {
    l.aborted = true;
  }
  if (l.aborted || !std::isfinite(l.total) || !g_inv.allFinite() || !g_fwd.allFinite()) {
    std::clog << "[icm] non-finite loss; update skipped\n";
    l.aborted = true;
    return l;
  }
  const AdamConfig opt{lr};
  if (nets.beta < 1.0) nn::adam_step<Scalar>(nets.inverse.params(), g_inv, nets.inverse_adam, opt);
  if (nets.beta > 0.0) nn::adam_step<Scalar>(nets.forward.params(), g_fwd, nets.forward_adam, opt);
  return l;
}

}  // namespace hcmflight
