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

// Component-level models: per-quadrotor rotor mixing and the Newton-Euler
// equations of the payload and both quadrotors, used to check that the
// integrated single-body model is consistent with its parts.

#pragma once

#include <array>

#include "agno/dynamics.hpp"
#include "agno/types.hpp"

namespace agno::components {

// Rows: thrust sum; roll arm; pitch arm; drag-moment ratio.
inline Mat4 rotor_mixing_matrix(const RotorParams& rotor) {
  const double r = rotor.r, q = rotor.varrho();
  Mat4 mix;
  mix << 1.0, 1.0, 1.0, 1.0,
         0.0, r, 0.0, -r,
         -r, 0.0, r, 0.0,
         q, -q, q, -q;
  return mix;
}

struct QuadThrustTorque {
  double thrust = 0.0;
  Vec3 torque = Vec3::Zero();
};

inline QuadThrustTorque rotor_mixing(const Vec4& rotor_thrusts, const RotorParams& rotor) {
  if ((rotor_thrusts.array() < 0.0).any()) {
    throw ValidationError("rotor thrusts must be non-negative");
  }
  const Vec4 out = rotor_mixing_matrix(rotor) * rotor_thrusts;
  return {out(0), out.tail<3>()};
}

// Rotor thrusts reproducing (T, tau). May be negative if the request is not
// achievable with unidirectional rotors.
inline Vec4 rotor_unmixing(const QuadThrustTorque& tt, const RotorParams& rotor) {
  Vec4 w;
  w << tt.thrust, tt.torque;
  return rotor_mixing_matrix(rotor).partialPivLu().solve(w);
}

// Rotor speeds from thrusts, F = k_t S^2.
inline Vec4 rotor_speeds(const Vec4& rotor_thrusts, const RotorParams& rotor) {
  return (rotor_thrusts.array().max(0.0) / rotor.k_t).sqrt();
}

// Accelerations of every rigid component for a given body motion.
//   omega, omega_dot: body frame. CoM acceleration: inertial frame.
struct ComponentMotion {
  EulerAngles xi{};
  Vec3 omega = Vec3::Zero();
  Vec3 omega_dot = Vec3::Zero();
  Vec3 payload_accel = Vec3::Zero();
  std::array<Vec3, 2> quad_accel{Vec3::Zero(), Vec3::Zero()};
};

struct QuadPairInputs {
  std::array<double, 2> thrust{0.0, 0.0};
  std::array<Vec3, 2> torque{Vec3::Zero(), Vec3::Zero()};  // body frame
};

// Forces (inertial frame) and torques (body frame) exerted by quadrotor j on
// the payload.
struct InternalWrenches {
  std::array<Vec3, 2> force{Vec3::Zero(), Vec3::Zero()};
  std::array<Vec3, 2> torque{Vec3::Zero(), Vec3::Zero()};
};

// Offset of the system CoM from the payload CoM, body frame.
inline Vec3 com_offset(const SystemParams& params) {
  return (params.m_q1 * params.s1 + params.m_q2 * params.s2) / params.m;
}

inline ComponentMotion rigid_component_motion(const EulerAngles& xi, const Vec3& com_accel,
                                              const Vec3& omega, const Vec3& omega_dot,
                                              const SystemParams& params) {
  const Mat3 r = dynamics::rotation_matrix(xi);
  auto point_accel = [&](const Vec3& offset) -> Vec3 {
    return r * (omega_dot.cross(offset) + omega.cross(omega.cross(offset)));
  };
  ComponentMotion motion;
  motion.xi = xi;
  motion.omega = omega;
  motion.omega_dot = omega_dot;
  const Vec3 c = com_offset(params);
  motion.payload_accel = com_accel + point_accel(-c);
  motion.quad_accel[0] = com_accel + point_accel(params.s1 - c);
  motion.quad_accel[1] = com_accel + point_accel(params.s2 - c);
  return motion;
}

// Totals seen by the integrated body: T = sum T_qj, tau = sum tau_qj + s_j x T_qj e.
inline ControlInput total_input(const QuadPairInputs& in, const SystemParams& params) {
  const Vec3 e = Vec3::UnitZ();
  ControlInput u;
  u.thrust = in.thrust[0] + in.thrust[1];
  u.torque = in.torque[0] + in.torque[1] + params.s1.cross(in.thrust[0] * e) +
             params.s2.cross(in.thrust[1] * e);
  return u;
}

// Rigid-body motion of the integrated body (Newton in the inertial frame,
// Euler in the body frame, composite inertia about the CoM).
inline ComponentMotion integrated_body_motion(const EulerAngles& xi, const Vec3& omega,
                                              const QuadPairInputs& in,
                                              const Wrench& external,
                                              const SystemParams& params) {
  const Mat3 r = dynamics::rotation_matrix(xi);
  const ControlInput u = total_input(in, params);
  const Vec3 e = Vec3::UnitZ();
  const Vec3 com_accel = (r * (u.thrust * e) - params.m * params.g * e +
                          external.force) / params.m;
  const Mat3 i = params.inertia();
  const Vec3 omega_dot =
      i.ldlt().solve(u.torque - omega.cross(i * omega) + external.torque);
  return rigid_component_motion(xi, com_accel, omega, omega_dot, params);
}

// Internal wrenches implied by each quadrotor's own Newton-Euler equations.
inline InternalWrenches solve_internal_wrenches(const ComponentMotion& motion,
                                                const QuadPairInputs& in,
                                                const SystemParams& params) {
  const Mat3 r = dynamics::rotation_matrix(motion.xi);
  const Vec3 e = Vec3::UnitZ();
  const Mat3 iq = params.I_quad.asDiagonal();
  const std::array<double, 2> mq{params.m_q1, params.m_q2};
  InternalWrenches w;
  for (int j = 0; j < 2; ++j) {
    w.force[j] = r * (in.thrust[j] * e) - mq[j] * params.g * e - mq[j] * motion.quad_accel[j];
    w.torque[j] = in.torque[j] - iq * motion.omega_dot - motion.omega.cross(iq * motion.omega);
  }
  return w;
}

// Sum of the residuals (lhs - rhs) of the payload equations and both
// quadrotor equations. Vanishes when every component equation holds; the
// external wrench acts on the payload (force inertial, torque body frame).
// Payload rotation is written about the payload CoM, so agreement with the
// integrated body requires com_offset(params) == 0 (the default geometry).
inline Vec6 component_consistency(const ComponentMotion& motion, const QuadPairInputs& in,
                                  const InternalWrenches& internal, const Wrench& external,
                                  const SystemParams& params) {
  const Mat3 r = dynamics::rotation_matrix(motion.xi);
  const Vec3 e = Vec3::UnitZ();
  const Vec3& w = motion.omega;
  const Vec3& wd = motion.omega_dot;
  const Mat3 ip = params.payload_inertia();
  const Mat3 iq = params.I_quad.asDiagonal();
  const std::array<double, 2> mq{params.m_q1, params.m_q2};
  const std::array<Vec3, 2> s{params.s1, params.s2};

  Vec3 trans = params.m_p * motion.payload_accel -
               (internal.force[0] + internal.force[1] - params.m_p * params.g * e +
                external.force);
  Vec3 rot = ip * wd - (internal.torque[0] + internal.torque[1] +
                        s[0].cross(r.transpose() * internal.force[0]) +
                        s[1].cross(r.transpose() * internal.force[1]) - w.cross(ip * w) +
                        external.torque);
  for (int j = 0; j < 2; ++j) {
    trans += mq[j] * motion.quad_accel[j] -
             (r * (in.thrust[j] * e) - internal.force[j] - mq[j] * params.g * e);
    rot += iq * wd - (in.torque[j] - internal.torque[j] - w.cross(iq * w));
  }
  Vec6 residual;
  residual << trans, rot;
  return residual;
}

}  // namespace agno::components
