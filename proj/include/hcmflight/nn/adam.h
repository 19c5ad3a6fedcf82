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

#ifndef HCMFLIGHT_NN_ADAM_H_
#define HCMFLIGHT_NN_ADAM_H_

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <Eigen/Core>

namespace hcmflight::nn {

template <typename S>
struct AdamConfig {
  S lr = S(3e-4);
  S beta1 = S(0.9);
  S beta2 = S(0.999);
  S epsilon = S(1e-8);
};

// First/second moment accumulators for one flat parameter vector.
template <typename S>
struct AdamState {
  Eigen::VectorX<S> m;
  Eigen::VectorX<S> v;
  std::int64_t step = 0;

  AdamState() = default;
  explicit AdamState(Eigen::Index size)
      : m(Eigen::VectorX<S>::Zero(size)), v(Eigen::VectorX<S>::Zero(size)) {}
};

// Bias-corrected Adam update of `params` in place.
template <typename S>
void adam_step(Eigen::Ref<Eigen::VectorX<S>> params,
               const Eigen::Ref<const Eigen::VectorX<S>>& grad,
               AdamState<S>& state, const AdamConfig<S>& config) {
  if (grad.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw std::invalid_argument("adam_step: parameter/gradient/moment shape mismatch");
  }
  ++state.step;
  state.m = config.beta1 * state.m + (1 - config.beta1) * grad;
  state.v = config.beta2 * state.v + (1 - config.beta2) * grad.cwiseAbs2();
  const S t = static_cast<S>(state.step);
  const S m_corr = 1 - std::pow(config.beta1, t);
  const S v_corr = 1 - std::pow(config.beta2, t);
  params.array() -= config.lr * (state.m.array() / m_corr) /
                    ((state.v.array() / v_corr).sqrt() + config.epsilon);
}

}  // namespace hcmflight::nn

#endif  // HCMFLIGHT_NN_ADAM_H_
