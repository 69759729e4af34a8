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

// Admittance reference generation and a cascaded tracking controller.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "agno/dynamics.hpp"
#include "agno/types.hpp"

namespace agno::control {

struct AdmittanceParams {
  Mat6 M_a = 0.95 * Mat6::Identity();
  Mat6 B_a = 1.54 * Mat6::Identity();
  Mat6 K_a = Mat6::Zero();
  // Channels driven by the wrench estimate; roll and pitch are off by default.
  std::array<bool, 6> active{true, true, true, false, false, true};

  void validate() const {
    const Eigen::SelfAdjointEigenSolver<Mat6> em(0.5 * (M_a + M_a.transpose()));
    if (!(em.eigenvalues()(0) > 0.0)) {
      throw ValidationError("admittance M_a must be positive definite");
    }
    for (const Mat6* m : {&B_a, &K_a}) {
      const Eigen::SelfAdjointEigenSolver<Mat6> e(0.5 * (*m + m->transpose()));
      if (e.eigenvalues()(0) < -1e-12) {
        throw ValidationError("admittance B_a and K_a must be positive semidefinite");
      }
    }
  }
};

struct ReferenceState {
  Vec6 eta = Vec6::Zero();
  Vec6 eta_dot = Vec6::Zero();
  Vec6 eta_ddot = Vec6::Zero();

  static ReferenceState at_rest(const Vec6& eta) { return {eta, Vec6::Zero(), Vec6::Zero()}; }
};

// Desired trajectory sample; treated as constant-acceleration over a step.
using DesiredState = ReferenceState;

// Integrates M_a (eta_r_ddot - eta_d_ddot) + B_a (eta_r_dot - eta_d_dot)
// + K_a (eta_r - eta_d) = T_hat over one step, holding T_hat. A positive push
// moves the reference along the push.
inline ReferenceState admittance_step(const ReferenceState& ref, const DesiredState& desired,
                                      const Wrench& t_hat, const AdmittanceParams& adm,
                                      double dt) {
  if (!(dt > 0.0)) throw ValidationError("admittance_step: dt must be positive");
  Vec6 input = t_hat.stacked();
  Vec6 z1 = ref.eta - desired.eta;
  Vec6 z2 = ref.eta_dot - desired.eta_dot;
  for (int i = 0; i < 6; ++i) {
    if (!adm.active[i]) {
      input(i) = 0.0;
      z1(i) = 0.0;
      z2(i) = 0.0;
    }
  }
  const Eigen::LDLT<Mat6> m_a(adm.M_a);
  auto accel = [&](const Vec6& a, const Vec6& b) -> Vec6 {
    return m_a.solve(input - adm.B_a * b - adm.K_a * a);
  };
  const Vec6 a1 = z2, b1 = accel(z1, z2);
  const Vec6 a2 = z2 + 0.5 * dt * b1, b2 = accel(z1 + 0.5 * dt * a1, a2);
  const Vec6 a3 = z2 + 0.5 * dt * b2, b3 = accel(z1 + 0.5 * dt * a2, a3);
  const Vec6 a4 = z2 + dt * b3, b4 = accel(z1 + dt * a3, a4);
  const Vec6 z1n = z1 + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
  Vec6 z2n = z2 + dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
  Vec6 z3n = accel(z1n, z2n);
  for (int i = 0; i < 6; ++i) {
    if (!adm.active[i]) {
      z2n(i) = 0.0;
      z3n(i) = 0.0;
    }
  }

  ReferenceState next;
  next.eta = desired.eta + dt * desired.eta_dot + 0.5 * dt * dt * desired.eta_ddot + z1n;
  next.eta_dot = desired.eta_dot + dt * desired.eta_ddot + z2n;
  next.eta_ddot = desired.eta_ddot + z3n;
  for (int i = 0; i < 6; ++i) {
    if (!adm.active[i]) next.eta(i) -= z1n(i);
  }
  return next;
}

// Acceleration-level gains of the cascaded PD controller. The attitude loop
// runs at 12 rad/s with damping 0.8, well above the 2 rad/s position loop.
struct ControlGains {
  double pos_p = 4.0;
  double pos_d = 3.5;
  double att_p = 144.0;
  double att_d = 19.2;
  double max_tilt = deg2rad(35.0);

  void validate() const {
    if (pos_p < 0.0 || pos_d < 0.0 || att_p < 0.0 || att_d < 0.0) {
      throw ValidationError("controller gains must be non-negative");
    }
    if (!(max_tilt > 0.0) || max_tilt >= dynamics::kAttitudeGuard) {
      throw ValidationError("max_tilt must lie inside the attitude guard");
    }
  }
};

struct TrackingOutput {
  ControlInput desired{};
  double phi_d = 0.0;
  double theta_d = 0.0;
  bool saturated = false;
};

// Outer loop: PD on position with gravity feedforward gives a thrust vector,
// whose magnitude is T and whose direction sets roll/pitch targets for the
// reference yaw. Inner loop: PD on the Euler angles with the Euler-space
// inertia and Coriolis term fed forward, mapped back to body torques.
inline TrackingOutput tracking_control(const SystemState& state, const ReferenceState& ref,
                                       const SystemParams& params, const ControlGains& gains) {
  dynamics::check_attitude_guard(state.xi);
  const Vec3 e = Vec3::UnitZ();
  TrackingOutput out;

  const Vec3 accel = ref.eta_ddot.head<3>() +
                     gains.pos_p * (ref.eta.head<3>() - state.p) +
                     gains.pos_d * (ref.eta_dot.head<3>() - state.p_dot);
  const Vec3 force = params.m * (accel + params.g * e);
  double thrust = force.norm();
  const double thrust_cap = 2.0 * params.T_max;
  if (thrust > thrust_cap) {
    thrust = thrust_cap;
    out.saturated = true;
  }

  const double psi_d = ref.eta(5);
  Vec3 dir = thrust > 0.0 ? Vec3(force / force.norm()) : Vec3(e);
  const double c = std::cos(psi_d), s = std::sin(psi_d);
  const Vec3 local{c * dir(0) + s * dir(1), -s * dir(0) + c * dir(1), dir(2)};
  out.phi_d = std::clamp(std::atan2(-local(1), std::hypot(local(0), local(2))),
                         -gains.max_tilt, gains.max_tilt);
  out.theta_d = std::clamp(std::atan2(local(0), local(2)), -gains.max_tilt, gains.max_tilt);

  Vec3 xi_ddot_des;
  xi_ddot_des(0) = gains.att_p * (out.phi_d - state.xi.phi) - gains.att_d * state.xi_dot(0);
  xi_ddot_des(1) = gains.att_p * (out.theta_d - state.xi.theta) - gains.att_d * state.xi_dot(1);
  xi_ddot_des(2) = ref.eta_ddot(5) + gains.att_p * (psi_d - state.xi.psi) +
                   gains.att_d * (ref.eta_dot(5) - state.xi_dot(2));

  const Mat3 j = dynamics::inertia_tensor(state.xi, params);
  const Vec3 inertial_torque =
      j * xi_ddot_des + dynamics::coriolis_term(state.xi, state.xi_dot, params);
  out.desired.thrust = thrust;
  out.desired.torque = dynamics::rotation_matrix(state.xi).transpose() * inertial_torque;
  return out;
}

}  // namespace agno::control
