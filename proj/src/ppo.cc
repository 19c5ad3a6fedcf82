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

#include "hcmflight/ppo.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

namespace hcmflight {

void PpoConfig::validate() const {
  if (!(gamma > 0 && gamma < 1)) throw std::invalid_argument("ppo.gamma must be in (0, 1)");
  if (!(lambda > 0 && lambda < 1)) throw std::invalid_argument("ppo.lambda must be in (0, 1)");
  if (!(clip_epsilon > 0 && clip_epsilon < 1)) {
    throw std::invalid_argument("ppo.clip_epsilon must be in (0, 1)");
  }
  if (batch_size <= 0 || epochs <= 0 || minibatch_size <= 0) {
    throw std::invalid_argument("ppo batch sizes and epochs must be > 0");
  }
}

std::vector<bool> RolloutBuffer::terminals() const {
  std::vector<bool> out(steps.size());
  for (size_t i = 0; i < steps.size(); ++i) out[i] = steps[i].terminal;
  return out;
}

VecX accumulate_gae(const VecX& deltas, const std::vector<bool>& terminals,
                    Scalar gamma, Scalar lambda) {
  if (static_cast<size_t>(deltas.size()) != terminals.size()) {
    throw std::invalid_argument("accumulate_gae: deltas/terminals length mismatch");
  }
  const Eigen::Index n = deltas.size();
  VecX adv(n);
  Scalar running = 0.0;
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const Scalar carry = terminals[t] ? 0.0 : gamma * lambda * running;
    running = deltas[t] + carry;
    adv[t] = running;
  }
  return adv;
}

VecX compute_gae(const VecX& rewards, const VecX& values,
                 const std::vector<bool>& terminals, Scalar gamma, Scalar lambda) {
  if (values.size() != rewards.size() + 1 ||
      terminals.size() != static_cast<size_t>(rewards.size())) {
    throw std::invalid_argument(
        "compute_gae: expected |values| = |rewards| + 1 = |terminals| + 1");
  }
  VecX deltas(rewards.size());
  for (Eigen::Index t = 0; t < rewards.size(); ++t) {
    const Scalar next = terminals[t] ? 0.0 : values[t + 1];
    deltas[t] = rewards[t] + gamma * next - values[t];
  }
  return accumulate_gae(deltas, terminals, gamma, lambda);
}

Scalar combined_delta(Scalar r_ext, Scalar r_int, Scalar v_ext_t,
                      Scalar v_ext_t1, Scalar v_int_t, Scalar v_int_t1,
                      Scalar gamma, bool standard_td) {
  const Scalar r = r_ext + r_int;
  if (standard_td) return r + gamma * (v_ext_t1 + v_int_t1) - (v_ext_t + v_int_t);
  return r + gamma * ((v_ext_t1 - v_ext_t) + (v_int_t1 - v_int_t));
}

Scalar clipped_surrogate(Scalar log_prob_new, Scalar log_prob_old,
                         Scalar advantage, Scalar epsilon) {
  const Scalar ratio = std::exp(log_prob_new - log_prob_old);
  const Scalar clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

void compute_advantages(RolloutBuffer& buffer, const PpoConfig& config) {
  const auto& steps = buffer.steps;
  const Eigen::Index n = static_cast<Eigen::Index>(steps.size());
  const std::vector<bool> terminals = buffer.terminals();

  VecX r_ext(n), r_int(n), v_ext(n + 1), v_int(n + 1), combined(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    const Transition& s = steps[t];
    r_ext[t] = s.r_ext;
    r_int[t] = s.r_int;
    v_ext[t] = s.v_ext;
    v_int[t] = s.v_int;
  }
  v_ext[n] = buffer.last_v_ext;
  v_int[n] = buffer.last_v_int;

  for (Eigen::Index t = 0; t < n; ++t) {
    const bool cut = terminals[t];
    combined[t] = combined_delta(r_ext[t], r_int[t], v_ext[t],
                                 cut ? 0.0 : v_ext[t + 1], v_int[t],
                                 cut ? 0.0 : v_int[t + 1], config.gamma,
                                 config.standard_td);
  }

  buffer.advantages_ext = compute_gae(r_ext, v_ext, terminals, config.gamma, config.lambda);
  buffer.advantages_int = compute_gae(r_int, v_int, terminals, config.gamma, config.lambda);
  buffer.advantages = accumulate_gae(combined, terminals, config.gamma, config.lambda);
  buffer.targets_ext = buffer.advantages_ext + v_ext.head(n);
  buffer.targets_int = buffer.advantages_int + v_int.head(n);
}

Minibatch Minibatch::gather(const RolloutBuffer& buffer, const VecX& advantages,
                            std::span<const int> indices) {
  const Eigen::Index b = static_cast<Eigen::Index>(indices.size());
  Minibatch mb;
  mb.obs.odometry.resize(kOdometryDim, b);
  mb.obs.aux.resize(kAuxDim, b);
  mb.actions.resize(kActionDim, b);
  mb.log_prob_old.resize(b);
  mb.advantages.resize(b);
  mb.targets_ext.resize(b);
  mb.targets_int.resize(b);
  for (Eigen::Index j = 0; j < b; ++j) {
    const int i = indices[j];
    const Transition& s = buffer.steps[i];
    mb.obs.odometry.col(j) = s.obs.odometry;
    mb.obs.aux.col(j) = s.obs.aux;
    mb.actions.col(j) = s.action;
    mb.log_prob_old[j] = s.log_prob_old;
    mb.advantages[j] = advantages[i];
    mb.targets_ext[j] = buffer.targets_ext[i];
    mb.targets_int[j] = buffer.targets_int[i];
  }
  return mb;
}

PolicyLossTerms policy_loss(const GaussianPolicy& policy, const Minibatch& batch,
                            Scalar clip_epsilon, Scalar entropy_coeff,
                            VecX* grad_mean_net, Vec4* grad_log_std) {
  const Eigen::Index b = batch.obs.size();
  Mlp::Cache cache;
  const MatX mean = policy.mean_net.forward(batch.obs.odometry, batch.obs.aux,
                                            grad_mean_net ? &cache : nullptr);
  const Eigen::Array<Scalar, kActionDim, 1> sigma = policy.log_std.array().exp();
  const MatX z =
      ((batch.actions - mean).array().colwise() / sigma).matrix();
  const Scalar log_two_pi = std::log(2.0 * kPi);
  const VecX log_prob =
      (-0.5 * z.colwise().squaredNorm().transpose()).array() -
      policy.log_std.sum() - 0.5 * kActionDim * log_two_pi;
  const Scalar entropy = policy.log_std.sum() + 0.5 * kActionDim * (log_two_pi + 1.0);

  PolicyLossTerms terms;
  terms.entropy = entropy;
  VecX d_log_prob(b);
  for (Eigen::Index i = 0; i < b; ++i) {
    const Scalar ratio = std::exp(log_prob[i] - batch.log_prob_old[i]);
    const Scalar adv = batch.advantages[i];
    const Scalar clipped = std::clamp(ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon);
    const bool unclipped_active = ratio * adv <= clipped * adv;
    terms.surrogate += std::min(ratio * adv, clipped * adv);
    terms.mean_ratio += ratio;
    if (std::abs(ratio - 1.0) > clip_epsilon) terms.clip_fraction += 1.0;
    d_log_prob[i] = unclipped_active ? -ratio * adv / b : 0.0;
  }
  terms.surrogate /= b;
  terms.mean_ratio /= b;
  terms.clip_fraction /= b;
  terms.loss = -terms.surrogate - entropy_coeff * entropy;

  if (grad_mean_net) {
    // dlogp/dmean = z / sigma
    const MatX d_mean =
        ((z.array().colwise() / sigma).rowwise() * d_log_prob.transpose().array())
            .matrix();
    *grad_mean_net = policy.mean_net.backward(cache, d_mean);
  }
  if (grad_log_std) {
    // dlogp/dlog_std = z^2 - 1
    *grad_log_std = (z.array().square() - 1.0).matrix() * d_log_prob;
    grad_log_std->array() -= entropy_coeff;
  }
  return terms;
}

Scalar value_loss(const ValueNet& head, const ObservationBatch& obs,
                  const VecX& targets, VecX* grad) {
  Mlp::Cache cache;
  const MatX v = head.net.forward(obs.odometry, obs.aux, grad ? &cache : nullptr);
  const VecX err = v.row(0).transpose() - targets;
  const Scalar b = static_cast<Scalar>(targets.size());
  if (grad) *grad = head.net.backward(cache, (2.0 / b) * err.transpose());
  return err.squaredNorm() / b;
}

UpdateStats ppo_update(const RolloutBuffer& buffer, ActorCritic& nets,
                       const PpoConfig& config, Rng& rng) {
  const int n = static_cast<int>(buffer.steps.size());
  if (n == 0 || buffer.advantages.size() != n || buffer.targets_ext.size() != n) {
    throw std::logic_error("ppo_update: advantages have not been computed");
  }
  const ActorCritic snapshot = nets;

  VecX adv = buffer.advantages;
  if (config.normalize_advantages && n >= 2) {
    const Scalar mean = adv.mean();
    const Scalar stddev = std::sqrt((adv.array() - mean).square().mean());
    adv = (adv.array() - mean) / (stddev + 1e-8);
  }

  AdamConfig opt_policy{config.lr_policy};
  AdamConfig opt_ext{config.lr_value_ext};
  AdamConfig opt_int{config.lr_value_int};

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  UpdateStats stats;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (int start = 0; start < n; start += config.minibatch_size) {
      const int len = std::min(config.minibatch_size, n - start);
      const Minibatch mb = Minibatch::gather(
          buffer, adv, std::span<const int>(order.data() + start, len));

      VecX g_mean, g_ext, g_int;
      Vec4 g_log_std;
      PolicyLossTerms pl;
      Scalar loss_ext = 0.0, loss_int = 0.0;
      bool finite = true;
      try {
        pl = policy_loss(nets.policy, mb, config.clip_epsilon,
                         config.entropy_coeff, &g_mean, &g_log_std);
        loss_ext = value_loss(nets.value_ext, mb.obs, mb.targets_ext, &g_ext);
        loss_int = value_loss(nets.value_int, mb.obs, mb.targets_int, &g_int);
        finite = std::isfinite(pl.loss) && std::isfinite(loss_ext) &&
                 std::isfinite(loss_int) && g_mean.allFinite() &&
                 g_log_std.allFinite() && g_ext.allFinite() && g_int.allFinite();
      } catch (const NumericalError& e) {
        finite = false;
        stats.abort_reason = e.what();
      }
      if (!finite) {
        std::clog << "[ppo] non-finite loss in epoch " << epoch
                  << ", minibatch starting at " << start
                  << "; restoring pre-update parameters\n";
        nets = snapshot;
        stats.aborted = true;
        if (stats.abort_reason.empty()) stats.abort_reason = "non-finite loss";
        return stats;
      }

      const Scalar total = pl.loss + config.value_coeff * (loss_ext + loss_int);
      if (stats.minibatches == 0) stats.initial_total_loss = total;
      stats.policy_loss += pl.loss;
      stats.value_loss_ext += loss_ext;
      stats.value_loss_int += loss_int;
      stats.entropy += pl.entropy;
      stats.mean_ratio += pl.mean_ratio;
      stats.clip_fraction += pl.clip_fraction;
      stats.total_loss += total;
      ++stats.minibatches;

      nn::adam_step<Scalar>(nets.policy.mean_net.params(), g_mean,
                            nets.policy.mean_adam, opt_policy);
      nn::adam_step<Scalar>(nets.policy.log_std, g_log_std,
                            nets.policy.log_std_adam, opt_policy);
      nets.policy.log_std = nets.policy.log_std.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
      nn::adam_step<Scalar>(nets.value_ext.net.params(), config.value_coeff * g_ext,
                            nets.value_ext.adam, opt_ext);
      nn::adam_step<Scalar>(nets.value_int.net.params(), config.value_coeff * g_int,
                            nets.value_int.adam, opt_int);
    }
  }

  const Scalar k = static_cast<Scalar>(std::max(1, stats.minibatches));
  stats.policy_loss /= k;
  stats.value_loss_ext /= k;
  stats.value_loss_int /= k;
  stats.entropy /= k;
  stats.mean_ratio /= k;
  stats.clip_fraction /= k;
  stats.total_loss /= k;
  return stats;
}

}  // namespace hcmflight
