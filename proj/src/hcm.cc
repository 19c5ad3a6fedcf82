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

#include "hcmflight/hcm.h"

#include <array>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace hcmflight {

void HcmConfig::validate() const {
  if (segment_length <= 0 || stride <= 0 || heads_per_type <= 0 || hidden <= 0 ||
      epochs <= 0 || minibatch_size <= 0) {
    throw std::invalid_argument("hcm sizes must be > 0");
  }
  if (!(beta >= 0 && beta <= 1)) throw std::invalid_argument("hcm.beta must be in [0, 1]");
  if (!(kappa > 0 && kappa < 1)) throw std::invalid_argument("hcm.kappa must be in (0, 1)");
  if (alpha_curiosity < 0) throw std::invalid_argument("hcm.alpha_curiosity must be >= 0");
}

std::vector<SegmentBundle> make_bundles(const RolloutBuffer& buffer, int n, int stride) {
  const auto& steps = buffer.steps;
  const int total = static_cast<int>(steps.size());
  std::vector<SegmentBundle> bundles;
  if (n <= 0 || stride <= 0 || total < 2 * n + 1) return bundles;

  // terminals_before[i] = number of terminal flags on steps [0, i)
  std::vector<int> terminals_before(total + 1, 0);
  for (int i = 0; i < total; ++i) {
    terminals_before[i + 1] = terminals_before[i] + (steps[i].terminal ? 1 : 0);
  }

  for (int t = n; t + n <= total - 1; t += stride) {
    if (terminals_before[t + n] - terminals_before[t - n] != 0) continue;
    SegmentBundle b;
    b.anchor = t;
    b.past.resize(kObsDim, n + 1);
    b.future.resize(kObsDim, n + 1);
    b.positions.resize(3, 2 * n + 1);
    b.rewards.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
      b.past.col(k) = steps[t - n + k].obs.flat();
      b.future.col(k) = steps[t + k].obs.flat();
      b.rewards[k] = steps[t + k].r_ext;
    }
    for (int k = 0; k <= 2 * n; ++k) b.positions.col(k) = steps[t - n + k].position;
    bundles.push_back(std::move(b));
  }
  return bundles;
}

Eigen::Vector<Scalar, 9> Waypoints::flat() const {
  Eigen::Vector<Scalar, 9> out;
  out << wp1, wp2, wp3;
  return out;
}

Waypoints f_wp(const Positions& window) {
  if (window.cols() == 0) throw std::invalid_argument("f_wp: empty window");
  const int width = static_cast<int>(window.cols()) - 1;  // 2n
  const int n = width / 2;
  const int quarter = (width + 3) / 4;
  const Vec3 start = window.col(0);
  return {window.col(quarter) - start, window.col(n) - start,
          window.col(width) - start};
}

CuriosityHead CuriosityHead::create(HeadKind kind, int segment_length, int hidden,
                                    std::uint64_t seed) {
  Rng rng(seed);
  const int seg = kObsDim * (segment_length + 1);
  const int rewards = segment_length + 1;
  CuriosityHead head;
  head.kind = kind;
  if (kind == HeadKind::kStatesStates) {
    head.inverse = Mlp::orthogonal({2 * seg, 0, hidden, hidden, 9}, rng, 1.0, 1.0);
    head.forward = Mlp::orthogonal({seg + 9, 0, hidden, hidden, seg}, rng, 1.0, 1.0);
  } else {
    head.inverse = Mlp::orthogonal({seg + rewards, 0, hidden, hidden, 9}, rng, 1.0, 1.0);
    head.forward = Mlp::orthogonal({seg + 9, 0, hidden, hidden, rewards}, rng, 1.0, 1.0);
  }
  head.inverse_adam = AdamState(head.inverse.num_params());
  head.forward_adam = AdamState(head.forward.num_params());
  return head;
}

BundleBatch BundleBatch::from(std::span<const SegmentBundle> bundles) {
  BundleBatch b;
  const Eigen::Index count = static_cast<Eigen::Index>(bundles.size());
  if (count == 0) return b;
  const Eigen::Index seg = bundles[0].past.size();
  const Eigen::Index rewards = bundles[0].rewards.size();
  b.past.resize(seg, count);
  b.future.resize(seg, count);
  b.waypoints.resize(9, count);
  b.rewards.resize(rewards, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const SegmentBundle& s = bundles[i];
    if (s.past.size() != seg || s.future.size() != seg || s.rewards.size() != rewards) {
      throw std::invalid_argument("BundleBatch: bundles have inconsistent lengths");
    }
    b.past.col(i) = s.past.reshaped();
    b.future.col(i) = s.future.reshaped();
    b.waypoints.col(i) = f_wp(s.positions).flat();
    b.rewards.col(i) = s.rewards;
  }
  return b;
}

namespace {

MatX stack(const MatX& top, const MatX& bottom) {
  MatX out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

struct HeadIo {
  MatX inverse_input;
  MatX forward_input;
  const MatX* forward_target;
};

HeadIo head_io(const CuriosityHead& head, const BundleBatch& batch) {
  if (head.kind == HeadKind::kStatesStates) {
    return {stack(batch.past, batch.future), stack(batch.past, batch.waypoints),
            &batch.future};
  }
  return {stack(batch.past, batch.rewards), stack(batch.past, batch.waypoints),
          &batch.rewards};
}

}  // namespace

HeadBatchTerms head_terms(const CuriosityHead& head, const BundleBatch& batch,
                          Scalar beta) {
  const HeadIo io = head_io(head, batch);
  const MatX wp_hat = head.inverse.forward(io.inverse_input);
  const MatX seg_hat = head.forward.forward(io.forward_input);
  HeadBatchTerms t;
  t.l_inverse = 0.5 * (wp_hat - batch.waypoints).colwise().squaredNorm().transpose();
  t.l_forward = 0.5 * (seg_hat - *io.forward_target).colwise().squaredNorm().transpose();
  t.reward = (1.0 - beta) * t.l_inverse + beta * t.l_forward;
  return t;
}

HeadTerms head_loss(const CuriosityHead& head, const BundleBatch& batch, Scalar beta,
                    VecX* grad_inverse, VecX* grad_forward) {
  const HeadIo io = head_io(head, batch);
  const MatX none(0, batch.size());
  Mlp::Cache inv_cache, fwd_cache;
  const MatX wp_hat = head.inverse.forward(io.inverse_input, none,
                                           grad_inverse ? &inv_cache : nullptr);
  const MatX seg_hat = head.forward.forward(io.forward_input, none,
                                            grad_forward ? &fwd_cache : nullptr);
  const MatX inv_err = wp_hat - batch.waypoints;
  const MatX fwd_err = seg_hat - *io.forward_target;
  const Scalar n = static_cast<Scalar>(batch.size());

  HeadTerms t;
  t.l_inverse = 0.5 * inv_err.squaredNorm() / n;
  t.l_forward = 0.5 * fwd_err.squaredNorm() / n;
  t.reward = (1.0 - beta) * t.l_inverse + beta * t.l_forward;
  if (grad_inverse) {
    *grad_inverse = head.inverse.backward(inv_cache, ((1.0 - beta) / n) * inv_err);
  }
  if (grad_forward) {
    *grad_forward = head.forward.backward(fwd_cache, (beta / n) * fwd_err);
  }
  return t;
}

namespace {

HeadTerms single_bundle_terms(const SegmentBundle& bundle, const CuriosityHead& head,
                              Scalar beta) {
  const BundleBatch batch = BundleBatch::from(std::span(&bundle, 1));
  const HeadBatchTerms t = head_terms(head, batch, beta);
  return {t.reward[0], t.l_inverse[0], t.l_forward[0]};
}

}  // namespace

HeadTerms head_reward_ss(const SegmentBundle& bundle, const CuriosityHead& head,
                         Scalar beta) {
  if (head.kind != HeadKind::kStatesStates) {
    throw std::invalid_argument("head_reward_ss: head is not a states-states head");
  }
  return single_bundle_terms(bundle, head, beta);
}

HeadTerms head_reward_sr(const SegmentBundle& bundle, const CuriosityHead& head,
                         Scalar beta) {
  if (head.kind != HeadKind::kStatesRewards) {
    throw std::invalid_argument("head_reward_sr: head is not a states-rewards head");
  }
  return single_bundle_terms(bundle, head, beta);
}

namespace {

std::uint64_t derive_seed(std::uint64_t base, std::uint32_t kind, std::uint32_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    kind, index};
  std::array<std::uint32_t, 2> words;
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace

CuriosityEnsemble CuriosityEnsemble::create(const HcmConfig& config, std::uint64_t seed) {
  config.validate();
  CuriosityEnsemble e;
  e.config = config;
  for (int i = 0; i < config.heads_per_type; ++i) {
    e.ss_heads.push_back(CuriosityHead::create(HeadKind::kStatesStates,
                                               config.segment_length, config.hidden,
                                               derive_seed(seed, 0, i)));
    e.sr_heads.push_back(CuriosityHead::create(HeadKind::kStatesRewards,
                                               config.segment_length, config.hidden,
                                               derive_seed(seed, 1, i)));
  }
  return e;
}

VecX ensemble_rewards(const BundleBatch& batch, const CuriosityEnsemble& ensemble) {
  VecX sum = VecX::Zero(batch.size());
  for (const auto* heads : {&ensemble.ss_heads, &ensemble.sr_heads}) {
    for (const CuriosityHead& h : *heads) sum += head_terms(h, batch, ensemble.config.beta).reward;
  }
  const Scalar count =
      static_cast<Scalar>(ensemble.ss_heads.size() + ensemble.sr_heads.size());
  return ensemble.config.alpha_curiosity * sum / count;
}

Scalar ensemble_reward(const SegmentBundle& bundle, const CuriosityEnsemble& ensemble) {
  return ensemble_rewards(BundleBatch::from(std::span(&bundle, 1)), ensemble)[0];
}

void distribute_trajectory(RolloutBuffer& buffer, int anchor, Scalar r_curiosity,
                           Scalar kappa, int n) {
  auto& steps = buffer.steps;
  const int total = static_cast<int>(steps.size());
  if (anchor < 0 || anchor >= total) {
    throw std::out_of_range("distribute_trajectory: anchor outside buffer");
  }
  steps[anchor].r_int += r_curiosity;
  for (int x = 1; x <= n; ++x) {
    const int idx = anchor + x;
    if (idx >= total || steps[idx - 1].terminal) break;
    steps[idx].r_int += std::pow(kappa, x) * r_curiosity;
  }
  for (int x = 1; x <= n; ++x) {
    const int idx = anchor - x;
    if (idx < 0 || steps[idx].terminal) break;
    steps[idx].r_int += std::pow(kappa, x) * r_curiosity;
  }
}

HcmUpdateStats hcm_update(const BundleBatch& batch, CuriosityEnsemble& ensemble,
                          Scalar lr) {
  if (batch.size() == 0) throw std::invalid_argument("hcm_update: no bundles");
  const Scalar beta = ensemble.config.beta;
  const AdamConfig opt{lr};
  HcmUpdateStats stats;
  for (auto* heads : {&ensemble.ss_heads, &ensemble.sr_heads}) {
    Scalar loss_sum = 0.0;
    for (CuriosityHead& head : *heads) {
      VecX g_inv, g_fwd;
      HeadTerms t;
      bool finite = true;
      try {
        t = head_loss(head, batch, beta, &g_inv, &g_fwd);
        finite = std::isfinite(t.reward) && g_inv.allFinite() && g_fwd.allFinite();
      } catch (const NumericalError&) {
        finite = false;
      }
      stats.per_head.push_back(t);
      if (!finite) {
        std::clog << "[hcm] non-finite head loss; head left unchanged\n";
        ++stats.aborted_heads;
        continue;
      }
      loss_sum += t.reward;
      if (lr == 0.0) continue;
      if (beta < 1.0) nn::adam_step<Scalar>(head.inverse.params(), g_inv, head.inverse_adam, opt);
      if (beta > 0.0) nn::adam_step<Scalar>(head.forward.params(), g_fwd, head.forward_adam, opt);
    }
    const Scalar mean = heads->empty() ? 0.0 : loss_sum / heads->size();
    (heads == &ensemble.ss_heads ? stats.loss_ss : stats.loss_sr) = mean;
  }
  return stats;
}

}  // namespace hcmflight
