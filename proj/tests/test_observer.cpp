// Copyright 2026 The AGNO Authors
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
#include <vector>

#include <gtest/gtest.h>

#include "agno/observer.hpp"
#include "test_util.hpp"

namespace agno::observer {
namespace {

using testing::Rng;

const SystemParams kParams = SystemParams::table1();
constexpr double kDt = 0.01;

// A body pinned at rest: the apparent wrench is G + A u, so any constant
// wrench can be presented by choosing u.
struct PinnedRig {
  SystemState state = testing::hover_state();
  ControlInput u_for(const Vec6& w) const {
    // At level attitude G + A u = (0, 0, m g - T, -tau).
    ControlInput u;
    u.thrust = kParams.m * kParams.g - w(2);
    u.torque = -w.tail<3>();
    return u;
  }
};

TEST(Gain, HoverValue) {
  EXPECT_NEAR(effective_gain(testing::hover_state(), kParams, ObserverGains{}), 2.145, 1e-12);
  EXPECT_DOUBLE_EQ(effective_gain(testing::hover_state(), kParams, ObserverGains::fixed(0.7)), 0.7);
}

TEST(Gain, GrowsWithVelocity) {
  SystemState s = testing::hover_state();
  s.p_dot = {3, 0, 4};
  EXPECT_NEAR(effective_gain(s, kParams, ObserverGains{}), 2.145 + 0.3 * 5.0, 1e-12);
  EXPECT_TRUE(gain_matrix(s, kParams, ObserverGains{})
                  .isApprox((2.145 + 1.5) * Mat6::Identity(), 1e-14));
}

TEST(Gain, MonotonicInRateNorm) {
  Rng rng(41);
  for (int i = 0; i < 200; ++i) {
    SystemState s = rng.state(deg2rad(30.0));
    const double k = effective_gain(s, kParams, ObserverGains{});
    s.p_dot *= 1.5;
    s.xi_dot *= 1.5;
    EXPECT_GE(effective_gain(s, kParams, ObserverGains{}), k);
  }
}

TEST(Gain, RejectsInvalid) {
  EXPECT_THROW(ObserverGains::fixed(0.0).validate(), ValidationError);
  EXPECT_THROW((ObserverGains{1.0, -0.1, 0.0}).validate(), ValidationError);
}

TEST(Observer, InitializationGivesZeroEstimate) {
  SystemState s = testing::hover_state();
  s.p_dot = {0.2, -0.1, 0.3};
  s.xi_dot = {0.01, 0.02, -0.03};
  const ObserverState obs = initialize(s, kParams, ObserverGains{});
  EXPECT_LT(obs.T_hat.stacked().norm(), 1e-15);
  EXPECT_LT((obs.delta + obs.gain * s.eta_dot()).norm(), 1e-15);
}

TEST(Observer, StepResponseOnFz) {
  PinnedRig rig;
  Vec6 w = Vec6::Zero();
  w(2) = 5.0;
  const ControlInput u = rig.u_for(w);
  ObserverState obs = initialize(rig.state, kParams, ObserverGains{});
  const double rate = 2.145 / kParams.m;
  for (int k = 1; k <= 6000; ++k) {
    SystemState y = rig.state;
    y.t = k * kDt;
    obs = observer_step(obs, y, u, kParams, ObserverGains{}, kDt);
    if (k == 100) {
      EXPECT_NEAR(obs.T_hat.force(2), 5.0 * (1.0 - std::exp(-rate * 1.0)), 1e-8);
    }
  }
  EXPECT_LT((obs.T_hat.stacked() - w).norm(), 1e-6);
}

TEST(Observer, ChannelDecayRatesAreKOverInertia) {
  PinnedRig rig;
  Vec6 w;
  w << 0.0, 0.0, -2.0, 0.3, -0.2, 0.1;
  const ControlInput u = rig.u_for(w);
  const ObserverGains g = ObserverGains::fixed(0.9);
  ObserverState obs = initialize(rig.state, kParams, g);
  for (int k = 1; k <= 200; ++k) obs = observer_step(obs, rig.state, u, kParams, g, kDt);
  Vec6 inertia;
  inertia << 3.9, 3.9, 3.9, 3.227, 0.061, 3.277;
  for (int i = 0; i < 6; ++i) {
    const double expected = w(i) * (1.0 - std::exp(-0.9 * 2.0 / inertia(i)));
    EXPECT_NEAR(obs.T_hat.stacked()(i), expected, 1e-7) << "channel " << i;
  }
}

TEST(Observer, ZeroGainFreezesEstimate) {
  PinnedRig rig;
  const ObserverGains zero{0.0, 0.0, 0.0, GainMode::kFixed};
  ObserverState obs = initialize(rig.state, kParams, ObserverGains::fixed(1.0));
  obs = observer_step(obs, rig.state, rig.u_for(Vec6::Constant(1.0)), kParams,
                      ObserverGains::fixed(1.0), kDt);
  const Vec6 frozen = obs.T_hat.stacked();
  SystemState moving = rig.state;
  for (int k = 0; k < 100; ++k) {
    moving.p_dot(0) = 0.01 * k;
    obs = observer_step(obs, moving, rig.u_for(Vec6::Constant(3.0)), kParams, zero, kDt);
  }
  EXPECT_LT((obs.T_hat.stacked() - frozen).norm(), 1e-15);
}

TEST(Observer, ConvergesOnMovingPlant) {
  // Torques small enough that the free plant stays far from the attitude guard.
  const Wrench w = Wrench::from((Vec6() << 1.0, -2.0, 5.0, 0.002, -0.0001, 0.01).finished());
  const ControlInput u = dynamics::gravity_balancing_input(kParams);
  SystemState truth = testing::hover_state();
  ObserverState obs = initialize(truth, kParams, ObserverGains{});
  for (int k = 0; k < 2000; ++k) {
    for (int j = 0; j < 10; ++j) truth = testing::plant_step(truth, u, w, kParams, 1e-3);
    obs = observer_step(obs, truth, u, kParams, ObserverGains{}, kDt);
    const Vec6 e = w.stacked() - obs.T_hat.stacked();
    const Vec6 invariant = obs.T_hat.stacked() - obs.gain * truth.eta_dot() - obs.delta;
    ASSERT_LT(invariant.norm(), 1e-12);
    if (k == 1999) EXPECT_LT(e.norm(), 1e-3);
  }
}

// Runs both observer forms on the same sampled trajectory.
double form_difference(double dt) {
  const Wrench w = Wrench::from((Vec6() << 0.5, 0.3, 1.0, 0.02, 0.004, -0.05).finished());
  ControlInput u = dynamics::gravity_balancing_input(kParams);
  u.thrust += 0.5;
  u.torque = Vec3(0.01, -0.002, 0.03);
  SystemState truth = testing::hover_state();
  ObserverState a = initialize(truth, kParams, ObserverGains{});
  ObserverState b = a;
  const int sub = static_cast<int>(std::lround(dt / 1e-4));
  double worst = 0.0;
  for (double t = 0.0; t < 3.0 - 1e-9; t += dt) {
    IntervalAccelerations acc;
    acc.start = dynamics::integrated_dynamics(truth, kParams, u, w);
    for (int j = 0; j < sub; ++j) truth = testing::plant_step(truth, u, w, kParams, 1e-4);
    acc.end = dynamics::integrated_dynamics(truth, kParams, u, w);
    a = observer_step(a, truth, u, kParams, ObserverGains{}, dt);
    b = observer_step_direct(b, truth, u, acc, kParams, ObserverGains{}, dt);
    worst = std::max(worst, (a.T_hat.stacked() - b.T_hat.stacked()).norm());
  }
  return worst;
}

TEST(Observer, AgreesWithAccelerationForm) {
  const double coarse = form_difference(0.01);
  const double fine = form_difference(0.002);
  EXPECT_LT(coarse, 1e-3);
  EXPECT_LT(fine, coarse);
}

TEST(Observer, RejectsBadStep) {
  const ObserverState obs = initialize(testing::hover_state(), kParams, ObserverGains{});
  EXPECT_THROW(observer_step(obs, testing::hover_state(), ControlInput{}, kParams,
                             ObserverGains{}, 0.0),
               ValidationError);
}

TEST(Lyapunov, Examples) {
  const SystemState s = testing::hover_state();
  EXPECT_NEAR(lyapunov_value(Vec6::Unit(0), s, kParams), 3.9, 1e-14);
  EXPECT_NEAR(lyapunov_value(Vec6::Unit(4), s, kParams), 0.061, 1e-14);
  EXPECT_NEAR(lyapunov_value(Vec6::Constant(1.0), s, kParams), 3 * 3.9 + 3.227 + 0.061 + 3.277,
              1e-12);
  EXPECT_EQ(lyapunov_value(Vec6::Zero(), s, kParams), 0.0);
}

TEST(Lyapunov, DecreasesForConstantWrenchAtRest) {
  PinnedRig rig;
  Vec6 w;
  w << 0.0, 0.0, 3.0, 0.2, 0.1, -0.3;
  ObserverState obs = initialize(rig.state, kParams, ObserverGains{});
  double prev = lyapunov_value(w, rig.state, kParams);
  for (int k = 0; k < 500; ++k) {
    obs = observer_step(obs, rig.state, rig.u_for(w), kParams, ObserverGains{}, kDt);
    const double v = lyapunov_value(w - obs.T_hat.stacked(), rig.state, kParams);
    ASSERT_LT(v, prev);
    prev = v;
  }
}

}  // namespace
}  // namespace agno::observer
