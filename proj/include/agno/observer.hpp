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

// Adaptive gain nonlinear wrench observer.
//
// The estimate obeys dT_hat/dt = B (T_ex - T_hat) with B = K M^-1(eta) and
// K = k_eff(eta, eta_dot) I6. It is implemented through the auxiliary vector
//
//   delta = T_hat - K eta_dot
//   d(delta)/dt = -B delta + B (C eta_dot + G + A u - K eta_dot)
//
// which needs velocities but never accelerations.
//
// Sampled-data semantics:
//  * the gain is held constant over each sampling interval (zero-order hold),
//    evaluated at the sample that opens the interval; when it changes, delta
//    is re-based so that T_hat is continuous;
//  * measurements are interpolated linearly between the two samples that
//    bound the interval, and the input u is held;
//  * delta is propagated with one classical RK4 step per interval.

#pragma once

#include <string>

#include "agno/dynamics.hpp"
#include "agno/types.hpp"

namespace agno::observer {

enum class GainMode { kFixed, kAdaptive };

struct ObserverGains {
  double k0 = 0.78;
  double k1 = 0.3;
  double k2 = 0.35;
  GainMode mode = GainMode::kAdaptive;

  void validate() const {
    if (!(k0 > 0.0)) throw ValidationError("observer gain k0 must be positive");
    if (k1 < 0.0 || k2 < 0.0) throw ValidationError("observer gains k1, k2 must be >= 0");
  }

  static ObserverGains fixed(double k) { return {k, 0.0, 0.0, GainMode::kFixed}; }
};

struct ObserverState {
  Vec6 delta = Vec6::Zero();
  Wrench T_hat{};
  double gain = 0.0;  // k_eff; the gain matrix is gain * I6
  SystemState last{};  // measurement closing the last interval
  double t = 0.0;

  Mat6 K_current() const { return gain * Mat6::Identity(); }
};

// k_eff = k0 + k1 ||eta_dot|| + k2 ||M(eta)||_2 in adaptive mode, k0 otherwise.
inline double effective_gain(const SystemState& state, const SystemParams& params,
                             const ObserverGains& gains) {
  if (gains.mode == GainMode::kFixed) return gains.k0;
  return gains.k0 + gains.k1 * state.eta_dot().norm() +
         gains.k2 * dynamics::inertia_matrix_norm(state.xi, params);
}

inline Mat6 gain_matrix(const SystemState& state, const SystemParams& params,
                        const ObserverGains& gains) {
  return effective_gain(state, params, gains) * Mat6::Identity();
}

namespace detail {

inline SystemState lerp(const SystemState& a, const SystemState& b, double s) {
  return SystemState::from(a.eta() + s * (b.eta() - a.eta()),
                           a.eta_dot() + s * (b.eta_dot() - a.eta_dot()),
                           a.t + s * (b.t - a.t));
}

inline Mat3 checked_inertia(const SystemState& state, const SystemParams& params) {
  const Mat3 j = dynamics::inertia_tensor(state.xi, params);
  if (dynamics::symmetric_condition(j) > dynamics::kMaxInertiaCondition) {
    throw SingularityError("observer: inertia matrix M(eta) is not invertible");
  }
  return j;
}

// M^-1 v for the block-diagonal generalized inertia.
inline Vec6 solve_inertia(const SystemState& state, const SystemParams& params,
                          const Vec6& v) {
  Vec6 out;
  out.head<3>() = v.head<3>() / params.m;
  out.tail<3>() = checked_inertia(state, params).ldlt().solve(v.tail<3>());
  return out;
}

// C eta_dot + G + A u.
inline Vec6 model_terms(const SystemState& state, const SystemParams& params,
                        const ControlInput& u) {
  const dynamics::CompactMatrices cm = dynamics::compact_matrices(state, params);
  return cm.C * state.eta_dot() + cm.G + cm.A * u.stacked();
}

template <typename Rhs>
Vec6 rk4(const Vec6& y0, double dt, Rhs&& rhs) {
  const Vec6 k1 = rhs(0.0, y0);
  const Vec6 k2 = rhs(0.5, y0 + 0.5 * dt * k1);
  const Vec6 k3 = rhs(0.5, y0 + 0.5 * dt * k2);
  const Vec6 k4 = rhs(1.0, y0 + dt * k3);
  return y0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline void require_finite(const ObserverState& obs) {
  if (!obs.delta.allFinite() || !obs.T_hat.finite() || !std::isfinite(obs.gain)) {
    throw NonFiniteError("observer step produced a non-finite estimate");
  }
}

}  // namespace detail

// delta(0) = -K eta_dot(0) so that T_hat(0) = 0.
inline ObserverState initialize(const SystemState& state0, const SystemParams& params,
                                const ObserverGains& gains) {
  ObserverState obs;
  obs.gain = effective_gain(state0, params, gains);
  obs.delta = -obs.gain * state0.eta_dot();
  obs.T_hat = Wrench::zero();
  obs.last = state0;
  obs.t = state0.t;
  return obs;
}

// Advances the observer over one sampling interval. `state` is the
// measurement at the end of the interval and `u` the input held over it.
inline ObserverState observer_step(const ObserverState& obs, const SystemState& state,
                                   const ControlInput& u, const SystemParams& params,
                                   const ObserverGains& gains, double dt) {
  if (!(dt > 0.0)) throw ValidationError("observer_step: dt must be positive");
  const double k = effective_gain(obs.last, params, gains);
  const Vec6 delta0 = obs.T_hat.stacked() - k * obs.last.eta_dot();

  auto rhs = [&](double s, const Vec6& delta) -> Vec6 {
    const SystemState x = detail::lerp(obs.last, state, s);
    const Vec6 forcing = detail::model_terms(x, params, u) - k * x.eta_dot();
    return k * detail::solve_inertia(x, params, forcing - delta);
  };

  ObserverState next;
  next.delta = detail::rk4(delta0, dt, rhs);
  next.gain = k;
  next.T_hat = Wrench::from(next.delta + k * state.eta_dot());
  next.last = state;
  next.t = obs.t + dt;
  detail::require_finite(next);
  return next;
}

// True generalized accelerations at both ends of a sampling interval.
struct IntervalAccelerations {
  Vec6 start = Vec6::Zero();
  Vec6 end = Vec6::Zero();
};

// Oracle form integrating dT_hat/dt = -B T_hat + B (M eta_ddot + C eta_dot +
// G + A u) with measured accelerations. Same hold and interpolation rules as
// observer_step; only used to validate the acceleration-free form.
inline ObserverState observer_step_direct(const ObserverState& obs, const SystemState& state,
                                          const ControlInput& u,
                                          const IntervalAccelerations& eta_ddot,
                                          const SystemParams& params,
                                          const ObserverGains& gains, double dt) {
  if (!(dt > 0.0)) throw ValidationError("observer_step_direct: dt must be positive");
  const double k = effective_gain(obs.last, params, gains);

  auto rhs = [&](double s, const Vec6& t_hat) -> Vec6 {
    const SystemState x = detail::lerp(obs.last, state, s);
    const Vec6 acc = eta_ddot.start + s * (eta_ddot.end - eta_ddot.start);
    const dynamics::CompactMatrices cm = dynamics::compact_matrices(x, params);
    const Vec6 measured = cm.M * acc + cm.C * x.eta_dot() + cm.G + cm.A * u.stacked();
    return k * detail::solve_inertia(x, params, measured - t_hat);
  };

  ObserverState next;
  next.T_hat = Wrench::from(detail::rk4(obs.T_hat.stacked(), dt, rhs));
  next.gain = k;
  next.delta = next.T_hat.stacked() - k * state.eta_dot();
  next.last = state;
  next.t = obs.t + dt;
  detail::require_finite(next);
  return next;
}

// V_e = e^T M(eta) e.
inline double lyapunov_value(const Vec6& error, const SystemState& state,
                             const SystemParams& params) {
  const dynamics::CompactMatrices cm = dynamics::compact_matrices(state, params);
  return error.dot(cm.M * error);
}

}  // namespace agno::observer
