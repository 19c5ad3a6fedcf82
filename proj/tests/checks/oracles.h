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

#ifndef HCMFLIGHT_TESTS_CHECKS_ORACLES_H_
#define HCMFLIGHT_TESTS_CHECKS_ORACLES_H_

#include <functional>
#include <vector>

#include "hcmflight/common.h"
#include "hcmflight/dynamics.h"
#include "hcmflight/ppo.h"

// Slow, direct reference computations the library is checked against.
namespace hcmflight::oracle {

// A_t = sum_l (gamma lambda)^l delta_{t+l}, summed term by term until the
// first terminal at or after t.
VecX brute_force_gae(const VecX& rewards, const VecX& values,
                     const std::vector<bool>& terminals, Scalar gamma, Scalar lambda);

// min(r A, clip(r) A) evaluated by cases on the sign of A.
Scalar clip_objective(Scalar ratio, Scalar advantage, Scalar epsilon);

// Body torque as the sum of rotor lever-arm cross products plus the
// reaction moments of alternating spin directions.
Vec3 torque_sum(const Vec4& motor_speeds, const VehicleParams& params);

// First-order motor lag integrated with many small RK4 steps.
Scalar motor_lag(Scalar current, Scalar commanded, Scalar tau, Scalar dt, int substeps);

// Central differences of f around x with step h.
VecX central_difference(const std::function<Scalar(const VecX&)>& f, const VecX& x,
                        Scalar h);

// ||a - b|| / max(||a||, ||b||), or 0 when both vanish.
Scalar relative_error(const VecX& a, const VecX& b);

// Anchors whose window [t-n, t+n] fits the buffer and holds no terminal on
// steps t-n .. t+n-1, found by scanning every step.
std::vector<int> enumerate_anchors(const std::vector<bool>& terminals, int n, int stride);

// Random buffer of `length` steps with random observations, positions and
// rewards; terminal flags drawn with probability p_terminal.
RolloutBuffer random_buffer(int length, Scalar p_terminal, Rng& rng);

}  // namespace hcmflight::oracle

#endif  // HCMFLIGHT_TESTS_CHECKS_ORACLES_H_
