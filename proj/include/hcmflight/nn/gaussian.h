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

#ifndef HCMFLIGHT_NN_GAUSSIAN_H_
#define HCMFLIGHT_NN_GAUSSIAN_H_

#include <cmath>
#include <numbers>

#include <Eigen/Core>

namespace hcmflight::nn {

template <typename S>
struct LogProbEntropy {
  S log_prob;
  S entropy;
};

// Diagonal Gaussian log density of `action` and the distribution entropy.
template <typename S>
LogProbEntropy<S> gaussian_log_prob_entropy(
    const Eigen::Ref<const Eigen::VectorX<S>>& mean,
    const Eigen::Ref<const Eigen::VectorX<S>>& log_std,
    const Eigen::Ref<const Eigen::VectorX<S>>& action) {
  const S log_two_pi = std::log(2 * std::numbers::pi_v<S>);
  const auto z = ((action - mean).array() / log_std.array().exp()).eval();
  const S n = static_cast<S>(mean.size());
  const S log_prob = -S(0.5) * z.square().sum() - log_std.sum() - S(0.5) * n * log_two_pi;
  const S entropy = log_std.sum() + S(0.5) * n * (log_two_pi + 1);
  return {log_prob, entropy};
}

}  // namespace hcmflight::nn

#endif  // HCMFLIGHT_NN_GAUSSIAN_H_
