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

#include "checks/acceptance_criteria.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "checks/oracles.h"
#include "hcmflight/dynamics.h"
#include "hcmflight/env.h"
#include "hcmflight/hcm.h"
#include "hcmflight/icm.h"
#include "hcmflight/trainer.h"
#include "hcmflight/visitation.h"

namespace hcmflight::acceptance {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

template <typename F>
Result timed(int id, std::string name, F&& body) {
  Result r;
  r.id = id;
  r.name = std::move(name);
  const auto start = Clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

// Policy-loss gradient check on one random instance.
Scalar policy_gradient_error(Rng& rng) {
  std::uniform_real_distribution<Scalar> u(-1.0, 1.0);
  ActorCritic nets = ActorCritic::create(6, rng);
  nets.policy.mean_net.params() += 0.3 * VecX::NullaryExpr(
      nets.policy.mean_net.num_params(), [&] { return u(rng); });
  for (int i = 0; i < kActionDim; ++i) nets.policy.log_std[i] = 0.5 * u(rng);
  RolloutBuffer buf = oracle::random_buffer(8, 0.0, rng);
  VecX adv(8);
  for (int i = 0; i < 8; ++i) {
    auto& s = buf.steps[i];
    const PolicyOutput out = forward_policy(nets.policy, s.obs);
    s.log_prob_old = log_prob_and_entropy(out, s.action).log_prob + 0.4 * u(rng);
    adv[i] = u(rng);
  }
  buf.targets_ext = VecX::Zero(8);
  buf.targets_int = VecX::Zero(8);
  std::vector<int> idx(8);
  for (int i = 0; i < 8; ++i) idx[i] = i;
  const Minibatch mb = Minibatch::gather(buf, adv, idx);
  const Scalar eps = 0.2, c2 = 0.01;

  VecX g_net;
  Vec4 g_std;
  policy_loss(nets.policy, mb, eps, c2, &g_net, &g_std);
  VecX analytic(g_net.size() + 4);
  analytic << g_net, g_std;
  VecX x(analytic.size());
  x << nets.policy.mean_net.params(), nets.policy.log_std;
  auto f = [&](const VecX& p) {
    GaussianPolicy probe = nets.policy;
    probe.mean_net.params() = p.head(g_net.size());
    probe.log_std = p.tail<4>();
    return policy_loss(probe, mb, eps, c2).loss;
  };
  return oracle::relative_error(
      analytic, oracle::central_difference(f, x, kFiniteDifferenceStep));
}

Scalar value_gradient_error(Rng& rng, bool intrinsic) {
  std::normal_distribution<Scalar> normal(0.0, 1.0);
  ActorCritic nets = ActorCritic::create(6, rng);
  ValueNet head = intrinsic ? nets.value_int : nets.value_ext;
  RolloutBuffer buf = oracle::random_buffer(8, 0.0, rng);
  std::vector<Observation> obs;
  for (const auto& s : buf.steps) obs.push_back(s.obs);
  const ObservationBatch batch = ObservationBatch::from(obs);
  VecX targets(8);
  for (int i = 0; i < 8; ++i) targets[i] = normal(rng);
  VecX analytic;
  value_loss(head, batch, targets, &analytic);
  auto f = [&](const VecX& p) {
    ValueNet probe = head;
    probe.net.params() = p;
    return value_loss(probe, batch, targets);
  };
  return oracle::relative_error(
      analytic, oracle::central_difference(f, head.net.params(), kFiniteDifferenceStep));
}

std::pair<Scalar, Scalar> icm_gradient_error(Rng& rng) {
  IcmConfig cfg;
  cfg.hidden = 6;
  IcmNets nets = IcmNets::create(cfg, rng);
  RolloutBuffer buf = oracle::random_buffer(8, 0.0, rng);
  const IcmBatch batch = IcmBatch::from(buf.steps);
  VecX gi, gf;
  icm_loss(nets, batch, &gi, &gf);
  auto fi = [&](const VecX& p) {
    IcmNets probe = nets;
    probe.inverse.params() = p;
    return icm_loss(probe, batch).total;
  };
  auto ff = [&](const VecX& p) {
    IcmNets probe = nets;
    probe.forward.params() = p;
    return icm_loss(probe, batch).total;
  };
  return {oracle::relative_error(gi, oracle::central_difference(
                                         fi, nets.inverse.params(), kFiniteDifferenceStep)),
          oracle::relative_error(gf, oracle::central_difference(
                                         ff, nets.forward.params(), kFiniteDifferenceStep))};
}

std::pair<Scalar, Scalar> head_gradient_error(Rng& rng, HeadKind kind) {
  const int n = 3;
  const CuriosityHead head = CuriosityHead::create(kind, n, 6, rng());
  const RolloutBuffer buf = oracle::random_buffer(30, 0.0, rng);
  auto bundles = make_bundles(buf, n, 4);
  bundles.resize(4);
  const BundleBatch batch = BundleBatch::from(bundles);
  const Scalar beta = 0.2;
  VecX gi, gf;
  head_loss(head, batch, beta, &gi, &gf);
  auto fi = [&](const VecX& p) {
    CuriosityHead probe = head;
    probe.inverse.params() = p;
    return head_loss(probe, batch, beta).reward;
  };
  auto ff = [&](const VecX& p) {
    CuriosityHead probe = head;
    probe.forward.params() = p;
    return head_loss(probe, batch, beta).reward;
  };
  return {oracle::relative_error(gi, oracle::central_difference(
                                         fi, head.inverse.params(), kFiniteDifferenceStep)),
          oracle::relative_error(gf, oracle::central_difference(
                                         ff, head.forward.params(), kFiniteDifferenceStep))};
}

}  // namespace

Result gradient_correctness() {
  return timed(1, "gradient correctness", [](Result& r) {
    Rng rng(20260101);
    const int instances = 20;
    Scalar worst[9] = {};
    for (int k = 0; k < instances; ++k) {
      worst[0] = std::max(worst[0], policy_gradient_error(rng));
      worst[1] = std::max(worst[1], value_gradient_error(rng, false));
      worst[2] = std::max(worst[2], value_gradient_error(rng, true));
      const auto [ii, ifw] = icm_gradient_error(rng);
      worst[3] = std::max(worst[3], ii);
      worst[4] = std::max(worst[4], ifw);
      const auto [si, sf] = head_gradient_error(rng, HeadKind::kStatesStates);
      worst[5] = std::max(worst[5], si);
      worst[6] = std::max(worst[6], sf);
      const auto [ri, rf] = head_gradient_error(rng, HeadKind::kStatesRewards);
      worst[7] = std::max(worst[7], ri);
      worst[8] = std::max(worst[8], rf);
    }
    const char* names[9] = {"policy", "value_ext", "value_int", "icm_inv", "icm_fwd",
                            "ss_inv", "ss_fwd", "sr_inv", "sr_fwd"};
    r.passed = true;
    std::ostringstream os;
    os << instances << " instances each, max rel err";
    for (int i = 0; i < 9; ++i) {
      os << ' ' << names[i] << '=' << sci(worst[i]);
      r.passed = r.passed && worst[i] < kGradientRelTol;
    }
    r.detail = os.str();
  });
}

Result gae_oracle() {
  return timed(2, "GAE oracle", [](Result& r) {
    Rng rng(20260102);
    std::uniform_int_distribution<int> length(1, 64);
    std::uniform_real_distribution<Scalar> unit(0.0, 1.0);
    std::normal_distribution<Scalar> normal(0.0, 1.0);
    Scalar worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const int T = length(rng);
      const Scalar gamma = 0.5 + 0.499 * unit(rng);
      const Scalar lambda = 0.5 + 0.499 * unit(rng);
      VecX rewards(T), values(T + 1);
      std::vector<bool> terminals(T);
      for (int t = 0; t < T; ++t) {
        rewards[t] = normal(rng);
        terminals[t] = unit(rng) < 0.15;
      }
      for (int t = 0; t <= T; ++t) values[t] = normal(rng);
      const VecX fast = compute_gae(rewards, values, terminals, gamma, lambda);
      const VecX slow = oracle::brute_force_gae(rewards, values, terminals, gamma, lambda);
      worst = std::max(worst, (fast - slow).cwiseAbs().maxCoeff());
    }
    r.passed = worst <= kGaeTol;
    r.detail = "1000 sequences, max abs diff " + sci(worst);
  });
}

Result clip_semantics() {
  return timed(3, "clip semantics", [](Result& r) {
    Rng rng(20260103);
    std::uniform_real_distribution<Scalar> log_ratio(-1.5, 1.5);
    std::normal_distribution<Scalar> normal(0.0, 2.0);
    const Scalar eps = 0.2;
    int mismatches = 0, pessimism_violations = 0, pessimism_cases = 0;
    for (int k = 0; k < 100000; ++k) {
      const Scalar lr = log_ratio(rng);
      const Scalar adv = normal(rng);
      const Scalar value = clipped_surrogate(lr, 0.0, adv, eps);
      const Scalar ratio = std::exp(lr - 0.0);
      if (value != oracle::clip_objective(ratio, adv, eps)) ++mismatches;
      if (adv > 0.0 && ratio > 1.0 + eps) {
        ++pessimism_cases;
        if (value > ratio * adv) ++pessimism_violations;
      }
    }
    r.passed = mismatches == 0 && pessimism_violations == 0 && pessimism_cases > 0;
    r.detail = "1e5 triples, mismatches " + std::to_string(mismatches) +
               ", pessimism violations " + std::to_string(pessimism_violations) + "/" +
               std::to_string(pessimism_cases);
  });
}

Result physics_sanity() {
  return timed(4, "physics sanity", [](Result& r) {
    VehicleParams p;
    p.motor_noise_std = 0.0;
    Rng rng(20260104);

    RigidBodyState hover;
    hover.position = Vec3(0, 0, 1.5);
    hover.motor_speeds = Vec4::Constant(hover_speed(p));
    Vec3 lin, ang;
    compute_accelerations(hover, p, &lin, &ang);
    const RigidBodyState after = step(hover, hover.motor_speeds, p, 0.01, rng);
    const Scalar hover_lin = std::max(lin.norm(), after.linear_accel.norm());
    const Scalar hover_ang = std::max(ang.norm(), after.angular_accel.norm());

    VehicleParams nodrag = p;
    nodrag.linear_drag_coeff = 0.0;
    nodrag.angular_drag_coeff = 0.0;

    // At rest the drag term vanishes too; once moving, only the drag-free
    // model stays at exactly -g.
    RigidBodyState fall;
    fall.position = Vec3(0, 0, 1.5);
    compute_accelerations(fall, p, &lin, &ang);
    const RigidBodyState fell = step(fall, Vec4::Zero(), nodrag, 0.01, rng);
    const bool free_fall = lin == Vec3(0, 0, -p.gravity) &&
                           fell.linear_accel == Vec3(0, 0, -p.gravity);
    RigidBodyState s;
    s.position = Vec3(0.5, -0.3, 20.0);
    s.velocity = Vec3(1.0, -0.5, 2.0);
    s.angular_velocity = Vec3(0.4, -0.2, 1.0);
    const Scalar e0 = mechanical_energy(s, nodrag);
    for (int k = 0; k < 100; ++k) s = step(s, Vec4::Zero(), nodrag, 0.01, rng);
    const Scalar drift = std::abs(mechanical_energy(s, nodrag) - e0) / std::abs(e0);

    r.passed = hover_lin < kHoverLinearTol && hover_ang < kHoverAngularTol && free_fall &&
               drift < kEnergyDriftTol;
    r.detail = "hover |a| " + sci(hover_lin) + ", |alpha| " + sci(hover_ang) +
               ", free fall exact " + (free_fall ? "yes" : "no") +
               ", energy drift over 1 s " + sci(drift);
  });
}

Result reward_formulas() {
  return timed(5, "reward formulas", [](Result& r) {
    EnvConfig cfg;
    bool ok = true;
    std::ostringstream os;

    // Desired pose, for the default goal and for an offset goal.
    for (const Vec3 goal : {cfg.goal_position, Vec3(1.0, -2.0, 1.0)}) {
      EnvConfig c = cfg;
      c.goal_position = goal;
      const Scalar psi = desired_yaw(goal.head<2>(), 0.7);
      Vec6 pose;
      pose << goal, c.goal_roll, c.goal_pitch, psi;
      ok = ok && compute_flight_reward(pose, psi, c) == 3.0 * c.alpha_p;
    }
    os << "desired pose " << (ok ? "3*alpha_p" : "WRONG");

    // Shaping boundary on each position axis.
    bool boundary = true;
    for (int axis = 0; axis < 3; ++axis) {
      Vec6 pose;
      pose << cfg.goal_position, 0.0, 0.0, 0.0;
      const Scalar half = cfg.bounds[axis] / 2.0;
      pose[axis] = cfg.goal_position[axis] + half;
      const Scalar at = compute_flight_reward(pose, 0.0, cfg);
      pose[axis] = std::nextafter(cfg.goal_position[axis] + half,
                                  std::numeric_limits<Scalar>::infinity());
      const Scalar beyond = compute_flight_reward(pose, 0.0, cfg);
      boundary = boundary && at == cfg.alpha_p * (0.5 + 2.0) &&
                 beyond == cfg.alpha_p * (-1.0 + 2.0);
    }
    ok = ok && boundary;
    os << ", shaping boundary " << (boundary ? "exact" : "WRONG");

    // Terminal penalties through the environment.
    EnvConfig tc = cfg;
    VehicleParams quiet;
    quiet.motor_noise_std = 0.0;
    QuadrotorEnv env(tc, quiet);
    Rng rng(20260105);
    const Vec4 hover_action =
        Vec4::Constant(2.0 * hover_speed(quiet) / quiet.max_motor_speed - 1.0);

    RigidBodyState ground;
    ground.position = Vec3(1.0, 1.0, 0.04);
    ground.velocity = Vec3(0.0, 0.0, -0.5);
    ground.motor_speeds = Vec4::Constant(hover_speed(quiet));
    env.set_state(ground, {});
    StepResult crash = env.step(hover_action, rng);

    RigidBodyState flipped;
    flipped.position = Vec3(1.0, 1.0, 1.5);
    flipped.orientation = Quat(Eigen::AngleAxis<Scalar>(2.0, Vec3::UnitX()));
    flipped.motor_speeds = Vec4::Constant(hover_speed(quiet));
    env.set_state(flipped, {});
    StepResult flip = env.step(hover_action, rng);

    RigidBodyState near;
    near.position = Vec3(1.0, 1.0, 1.5);
    near.motor_speeds = Vec4::Constant(hover_speed(quiet));
    env.set_state(near, {Vec2(1.2, 1.0)});
    StepResult hit = env.step(hover_action, rng);

    const bool penalties =
        crash.terminal_cause == TerminalCause::kCrash && crash.r_ext == -10.0 &&
        flip.terminal_cause == TerminalCause::kCrash && flip.r_ext == -10.0 &&
        hit.terminal_cause == TerminalCause::kObstacleHit && hit.r_ext == -10.0;
    ok = ok && penalties;
    os << ", crash/obstacle r_ext " << (penalties ? "-10" : "WRONG");
    r.passed = ok;
    r.detail = os.str();
  });
}

Result kappa_decay() {
  return timed(6, "kappa decay", [](Result& r) {
    const Scalar kappa = 0.9, rc = 0.7315;
    const int n = 50;
    auto expect_close = [](Scalar got, Scalar want) {
      return std::abs(got - want) <=
             4 * std::numeric_limits<Scalar>::epsilon() * std::abs(want);
    };
    auto make = [](int length) {
      RolloutBuffer b;
      b.steps.resize(length);
      return b;
    };
    bool interior = true;
    {
      RolloutBuffer b = make(200);
      distribute_trajectory(b, 100, rc, kappa, n);
      for (int i = 0; i < 200; ++i) {
        const int x = std::abs(i - 100);
        const Scalar want = x <= n ? std::pow(kappa, x) * rc : 0.0;
        interior = interior && (x <= n ? expect_close(b.steps[i].r_int, want)
                                       : b.steps[i].r_int == 0.0);
      }
    }
    bool edges = true;
    {
      RolloutBuffer b = make(200);
      b.steps[80].terminal = true;   // previous flight ends at 80
      b.steps[110].terminal = true;  // this flight ends at 110
      distribute_trajectory(b, 100, rc, kappa, n);
      for (int i = 0; i < 200; ++i) {
        const bool inside = i >= 81 && i <= 110;
        const Scalar want = inside ? std::pow(kappa, std::abs(i - 100)) * rc : 0.0;
        edges = edges && (inside ? expect_close(b.steps[i].r_int, want)
                                 : b.steps[i].r_int == 0.0);
      }
      RolloutBuffer e = make(60);
      distribute_trajectory(e, 3, rc, kappa, n);
      distribute_trajectory(e, 57, -rc, kappa, n);
      // Buffer ends clip both anchors; contributions overlap additively.
      for (int i = 0; i < 60; ++i) {
        Scalar want = 0.0;
        if (std::abs(i - 3) <= n) want += std::pow(kappa, std::abs(i - 3)) * rc;
        if (std::abs(i - 57) <= n) want -= std::pow(kappa, std::abs(i - 57)) * rc;
        edges = edges && std::abs(e.steps[i].r_int - want) <=
                             8 * std::numeric_limits<Scalar>::epsilon() * rc;
      }
    }
    r.passed = interior && edges;
    r.detail = std::string("offsets 0..50 ") + (interior ? "exact" : "WRONG") +
               ", flight-edge and buffer-end clipping " + (edges ? "exact" : "WRONG");
  });
}

RolloutBuffer synthetic_flights(int family, int flights, int steps, Rng& rng) {
  std::uniform_real_distribution<Scalar> unit(0.0, 1.0);
  EnvConfig cfg;
  VehicleParams vehicle;
  const Scalar dt = cfg.control_dt;
  RolloutBuffer buf;
  for (int f = 0; f < flights; ++f) {
    const Scalar z = 1.0 + unit(rng);
    const Vec2 start(-3.0 + 2.0 * unit(rng), -3.0 + 6.0 * unit(rng));
    const Scalar speed = 0.4 + 0.6 * unit(rng);
    const Scalar heading = 0.5 * (unit(rng) - 0.5);
    const Scalar radius = 1.0 + unit(rng);
    const Scalar phase = 2.0 * kPi * unit(rng);
    const Scalar w = speed / radius;
    const Vec4 motors = Vec4::Constant(hover_speed(vehicle));
    for (int k = 0; k <= steps; ++k) {
      const Scalar t = k * dt;
      RigidBodyState s;
      if (family == 0) {
        const Vec2 dir(std::cos(heading), std::sin(heading));
        s.position << start + speed * t * dir, z;
        s.velocity << speed * dir, 0.0;
        s.orientation = Quat(Eigen::AngleAxis<Scalar>(heading, Vec3::UnitZ()));
      } else {
        const Scalar a = phase + w * t;
        s.position << radius * std::cos(a), radius * std::sin(a), z;
        s.velocity << -speed * std::sin(a), speed * std::cos(a), 0.0;
        s.linear_accel << -speed * w * std::cos(a), -speed * w * std::sin(a), 0.0;
        s.angular_velocity = Vec3(0, 0, w);
        s.orientation = Quat(Eigen::AngleAxis<Scalar>(a + kPi / 2, Vec3::UnitZ()));
      }
      s.motor_speeds = motors;
      const Observation obs = assemble_observation(s, motors, {}, cfg.goal_position, cfg,
                                                   vehicle);
      if (k > 0) {
        buf.steps.back().next_obs = obs;
      }
      if (k == steps) break;
      Transition tr;
      tr.obs = obs;
      tr.position = s.position;
      tr.env_action = Vec4::Constant(2.0 * motors[0] / vehicle.max_motor_speed - 1.0);
      tr.action = tr.env_action.array().atanh();
      const Vec6 pose = pose_of(s);
      tr.r_ext = compute_flight_reward(pose, desired_yaw(s.position.head<2>(), pose[5]), cfg) +
                 compute_velocity_reward(s.velocity, s.angular_velocity, cfg);
      tr.terminal = k == steps - 1;
      tr.flight_id = f;
      buf.steps.push_back(tr);
    }
  }
  return buf;
}

Result novelty_decay() {
  return timed(7, "curiosity novelty decay", [](Result& r) {
    Rng rng(20260107);
    HcmConfig hc;
    const int n = hc.segment_length;
    const RolloutBuffer lines = synthetic_flights(0, 32, 2 * n + 1, rng);
    const RolloutBuffer circles = synthetic_flights(1, 32, 2 * n + 1, rng);
    const auto trained = make_bundles(lines, n, hc.stride);
    const auto held_out = make_bundles(circles, n, hc.stride);
    const BundleBatch train_batch = BundleBatch::from(trained);
    const BundleBatch held_batch = BundleBatch::from(held_out);
    CuriosityEnsemble ens = CuriosityEnsemble::create(hc, 20260107);
    const Scalar hcm_before = ensemble_rewards(train_batch, ens).mean();
    for (int k = 0; k < kNoveltyUpdates; ++k) hcm_update(train_batch, ens, hc.lr);
    const Scalar hcm_after = ensemble_rewards(train_batch, ens).mean();
    const Scalar hcm_held = ensemble_rewards(held_batch, ens).mean();

    IcmConfig ic;
    IcmNets icm = IcmNets::create(ic, rng);
    const RolloutBuffer line_steps = synthetic_flights(0, 8, 32, rng);
    const RolloutBuffer circle_steps = synthetic_flights(1, 8, 32, rng);
    const IcmBatch icm_train = IcmBatch::from(line_steps.steps);
    const IcmBatch icm_held = IcmBatch::from(circle_steps.steps);
    const Scalar icm_before = icm_rewards(icm_train, icm).mean();
    for (int k = 0; k < kNoveltyUpdates; ++k) icm_update(icm_train, icm, ic.lr);
    const Scalar icm_after = icm_rewards(icm_train, icm).mean();
    const Scalar icm_held_r = icm_rewards(icm_held, icm).mean();

    r.passed = hcm_after * kNoveltyDecayFactor <= hcm_before && hcm_held > hcm_after &&
               icm_after * kNoveltyDecayFactor <= icm_before && icm_held_r > icm_after;
    std::ostringstream os;
    os << "hcm " << sci(hcm_before) << " -> " << sci(hcm_after) << " (held-out "
       << sci(hcm_held) << "), icm " << sci(icm_before) << " -> " << sci(icm_after)
       << " (held-out " << sci(icm_held_r) << ")";
    r.detail = os.str();
  });
}

RunConfig smoke_config() {
  RunConfig c;
  c.algorithm = Algorithm::kPpoHcm;
  c.seed = 5;
  c.total_batches = 50;
  c.out_dir = "runs/smoke";
  c.checkpoint_interval = 10;
  c.env.obstacle_count = 0;
  c.env.init_position_range = 0.2;
  c.env.init_attitude_range = 0.05;
  c.ppo.batch_size = 4096;
  c.ppo.minibatch_size = 512;
  return c;
}

namespace {

double window_mean(const std::vector<MetricsRow>& rows, bool last, double MetricsRow::*field) {
  double sum = 0.0;
  const std::size_t start = last ? rows.size() - 5 : 0;
  for (std::size_t i = start; i < start + 5; ++i) sum += rows[i].*field;
  return sum / 5.0;
}

}  // namespace

Result smoke_training() {
  return timed(8, "smoke training", [](Result& r) {
    Trainer trainer(smoke_config());
    std::vector<MetricsRow> rows;
    for (int b = 0; b < trainer.config().total_batches; ++b) rows.push_back(trainer.run_batch());
    const double r_first = window_mean(rows, false, &MetricsRow::mean_r_ext);
    const double r_last = window_mean(rows, true, &MetricsRow::mean_r_ext);
    const double f_first = window_mean(rows, false, &MetricsRow::failed_flights);
    const double f_last = window_mean(rows, true, &MetricsRow::failed_flights);
    r.passed = r_last > r_first && f_last < f_first;
    std::ostringstream os;
    os << "mean r_ext first-5 " << r_first << " last-5 " << r_last
       << ", failed flights first-5 " << f_first << " last-5 " << f_last;
    r.detail = os.str();
  });
}

Result visitation_pipeline(const std::string& scratch_dir) {
  return timed(9, "visitation pipeline", [&](Result& r) {
    RunConfig c;
    c.algorithm = Algorithm::kPpo;
    c.seed = 9;
    c.ppo.batch_size = 1024;
    c.ppo.minibatch_size = 256;
    c.ppo.epochs = 2;
    c.policy_hidden = 32;
    Trainer trainer(c);
    const fs::path dir = fs::path(scratch_dir) / "visitation";
    fs::create_directories(dir);
    bool totals = true, peak = true;
    std::vector<std::string> snapshots;
    for (int b = 0; b < 3; ++b) {
      trainer.run_batch();
      const VisitationGrid& grid = trainer.batch_grid();
      std::uint64_t in_bounds = 0;
      for (const auto& s : trainer.buffer().steps) {
        if (std::abs(s.position.x()) <= c.env.bounds.x() &&
            std::abs(s.position.y()) <= c.env.bounds.y()) {
          ++in_bounds;
        }
      }
      totals = totals && grid.total() == in_bounds && grid.in_bounds_visits() == in_bounds;
      const fs::path pgm = dir / ("grid_" + std::to_string(b) + ".pgm");
      write_pgm(pgm.string(), render_grid(grid));
      const GrayImage img = read_pgm(pgm.string());
      int max_row = 0, max_col = 0;
      for (int i = 0; i < grid.rows(); ++i)
        for (int j = 0; j < grid.cols(); ++j)
          if (grid.count(i, j) > grid.count(max_row, max_col)) max_row = i, max_col = j;
      const auto top = *std::max_element(img.pixels.begin(), img.pixels.end());
      peak = peak && top == 255 && img.pixels[max_row * img.width + max_col] == 255;
      snapshots.push_back(grid.to_csv());
    }
    const bool differ = snapshots[0] != snapshots[1] && snapshots[1] != snapshots[2];
    r.passed = totals && peak && differ;
    r.detail = std::string("totals ") + (totals ? "match" : "MISMATCH") + ", max cell " +
               (peak ? "255" : "WRONG") + ", snapshots " + (differ ? "differ" : "IDENTICAL");
  });
}

Result determinism(const std::string& scratch_dir) {
  return timed(10, "determinism", [&](Result& r) {
    RunConfig c;
    c.algorithm = Algorithm::kPpoHcm;
    c.seed = 10;
    c.total_batches = 5;
    c.ppo.batch_size = 1024;
    c.ppo.minibatch_size = 256;
    c.ppo.epochs = 3;
    c.hcm.epochs = 1;
    c.policy_hidden = 64;
    std::string csv[2];
    for (int k = 0; k < 2; ++k) {
      c.out_dir = (fs::path(scratch_dir) / ("determinism_" + std::to_string(k))).string();
      fs::remove_all(c.out_dir);
      const TrainArtifacts a = train(c);
      csv[k] = read_file(a.metrics_path);
    }
    const auto rows = std::count(csv[0].begin(), csv[0].end(), '\n') - 2;
    r.passed = csv[0] == csv[1] && rows >= 5;
    r.detail = std::to_string(rows) + " batches, metrics CSVs " +
               (csv[0] == csv[1] ? "byte-identical" : "DIFFER");
  });
}

std::vector<Result> run_all(bool include_smoke, const std::string& scratch_dir) {
  std::vector<Result> out;
  out.push_back(gradient_correctness());
  out.push_back(gae_oracle());
  out.push_back(clip_semantics());
  out.push_back(physics_sanity());
  out.push_back(reward_formulas());
  out.push_back(kappa_decay());
  out.push_back(novelty_decay());
  if (include_smoke) out.push_back(smoke_training());
  out.push_back(visitation_pipeline(scratch_dir));
  out.push_back(determinism(scratch_dir));
  return out;
}

std::string format(const Result& r) {
  std::ostringstream os;
  os << "criterion " << r.id << " [" << (r.passed ? "PASS" : "FAIL") << "] " << r.name
     << ": " << r.detail;
  os.precision(3);
  os << std::fixed << " (" << r.seconds << " s)";
  return os.str();
}

}  // namespace hcmflight::acceptance
