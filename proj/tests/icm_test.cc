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

#include <cmath>
#include <limits>

#include "checks/acceptance_criteria.h"
#include "checks/oracles.h"
#include "doctest.h"
#include "hcmflight/icm.h"

using namespace hcmflight;

namespace {

IcmNets small_nets(Rng& rng, Scalar beta = 0.2, Scalar eta = 1.0) {
  IcmConfig cfg;
  cfg.hidden = 16;
  cfg.beta = beta;
  cfg.eta = eta;
  return IcmNets::create(cfg, rng);
}

}  // namespace

TEST_CASE("perfect forward prediction gives zero reward") {
  Rng rng(1);
  IcmNets nets = small_nets(rng);
  const RolloutBuffer b = oracle::random_buffer(1, 0.0, rng);
  const Transition& t = b.steps[0];
  nets.forward.params().setZero();
  nets.forward.b3() = t.next_obs.flat();
  CHECK(icm_reward(t.obs.flat(), t.env_action, t.next_obs.flat(), nets) == 0.0);
}

TEST_CASE("reward scales with eta and matches direct evaluation") {
  Rng rng(2);
  IcmNets nets = small_nets(rng);
  const RolloutBuffer b = oracle::random_buffer(3, 0.0, rng);
  const Transition& t = b.steps[1];
  VecX in(kObsDim + kActionDim);
  in << t.obs.flat(), t.env_action;
  const VecX pred = nets.forward.forward(in);
  const Scalar want = 0.5 * (pred - t.next_obs.flat()).norm();
  const Scalar r1 = icm_reward(t.obs.flat(), t.env_action, t.next_obs.flat(), nets);
  CHECK(r1 == doctest::Approx(want).epsilon(1e-14));
  nets.eta = 2.0;
  CHECK(icm_reward(t.obs.flat(), t.env_action, t.next_obs.flat(), nets) ==
        doctest::Approx(2 * r1).epsilon(1e-14));

  const IcmBatch batch = IcmBatch::from(b.steps);
  const VecX all = icm_rewards(batch, nets);
  CHECK(all[1] == doctest::Approx(2 * r1).epsilon(1e-14));
}

TEST_CASE("batch uses the action the environment received") {
  Rng rng(3);
  const RolloutBuffer b = oracle::random_buffer(4, 0.0, rng);
  const IcmBatch batch = IcmBatch::from(b.steps);
  CHECK(batch.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(batch.actions.col(i) == b.steps[i].env_action);
    CHECK(batch.states.col(i) == b.steps[i].obs.flat());
    CHECK(batch.next_states.col(i) == b.steps[i].next_obs.flat());
  }
}

TEST_CASE("loss terms match hand evaluation") {
  Rng rng(4);
  const IcmNets nets = small_nets(rng, 0.3);
  const RolloutBuffer b = oracle::random_buffer(5, 0.0, rng);
  const IcmBatch batch = IcmBatch::from(b.steps);
  Scalar li = 0, lf = 0;
  for (int i = 0; i < 5; ++i) {
    VecX inv_in(2 * kObsDim), fwd_in(kObsDim + kActionDim);
    inv_in << batch.states.col(i), batch.next_states.col(i);
    fwd_in << batch.states.col(i), batch.actions.col(i);
    li += 0.5 * (VecX(nets.inverse.forward(inv_in)) - batch.actions.col(i)).squaredNorm();
    lf += 0.5 * (VecX(nets.forward.forward(fwd_in)) - batch.next_states.col(i)).squaredNorm();
  }
  const IcmLosses l = icm_loss(nets, batch);
  CHECK(l.inverse == doctest::Approx(li / 5).epsilon(1e-13));
  CHECK(l.forward == doctest::Approx(lf / 5).epsilon(1e-13));
  CHECK(l.total == doctest::Approx(0.7 * li / 5 + 0.3 * lf / 5).epsilon(1e-13));
}

TEST_CASE("loss weights switch nets off") {
  Rng rng(5);
  const RolloutBuffer b = oracle::random_buffer(8, 0.0, rng);
  const IcmBatch batch = IcmBatch::from(b.steps);
  SUBCASE("beta = 1 leaves the inverse net") {
    IcmNets nets = small_nets(rng, 1.0);
    const VecX inv = nets.inverse.params(), fwd = nets.forward.params();
    icm_update(batch, nets, 1e-3);
    CHECK(nets.inverse.params() == inv);
    CHECK(nets.forward.params() != fwd);
  }
  SUBCASE("beta = 0 leaves the forward net") {
    IcmNets nets = small_nets(rng, 0.0);
    const VecX inv = nets.inverse.params(), fwd = nets.forward.params();
    icm_update(batch, nets, 1e-3);
    CHECK(nets.forward.params() == fwd);
    CHECK(nets.inverse.params() != inv);
  }
}

TEST_CASE("repeated training on one transition lowers its reward") {
  Rng rng(6);
  IcmNets nets = small_nets(rng);
  const RolloutBuffer b = oracle::random_buffer(1, 0.0, rng);
  const IcmBatch batch = IcmBatch::from(b.steps);
  const Scalar before = icm_rewards(batch, nets)[0];
  for (int k = 0; k < 200; ++k) icm_update(batch, nets, 1e-3);
  CHECK(icm_rewards(batch, nets)[0] < before);
}

TEST_CASE("novelty decay on a frozen batch") {
  Rng rng(7);
  IcmNets nets = IcmNets::create(IcmConfig{}, rng);
  const RolloutBuffer b = acceptance::synthetic_flights(0, 8, 32, rng);
  const IcmBatch batch = IcmBatch::from(b.steps);
  const Scalar before = icm_rewards(batch, nets).mean();
  for (int k = 0; k < 500; ++k) icm_update(batch, nets, 1e-3);
  CHECK(icm_rewards(batch, nets).mean() < 0.5 * before);
}

TEST_CASE("non-finite loss leaves nets unchanged") {
  Rng rng(8);
  IcmNets nets = small_nets(rng);
  RolloutBuffer b = oracle::random_buffer(4, 0.0, rng);
  b.steps[2].next_obs.odometry[0] = std::numeric_limits<Scalar>::quiet_NaN();
  const IcmNets before = nets;
  const IcmLosses l = icm_update(IcmBatch::from(b.steps), nets, 1e-3);
  CHECK(l.aborted);
  CHECK(nets.inverse.params() == before.inverse.params());
  CHECK(nets.forward.params() == before.forward.params());
}

TEST_CASE("empty batch") {
  Rng rng(9);
  IcmNets nets = small_nets(rng);
  CHECK_THROWS_AS(icm_update(IcmBatch{}, nets, 1e-3), std::invalid_argument);
}

TEST_CASE("config validation") {
  IcmConfig c;
  CHECK_NOTHROW(c.validate());
  c.beta = 1.5;
  CHECK_THROWS(c.validate());
  c = IcmConfig{};
  c.eta = 0.0;
  CHECK_THROWS(c.validate());
}
