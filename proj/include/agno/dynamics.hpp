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

// Kinematics and Euler-angle equations of motion of the integrated
// two-quadrotor/payload body. All functions are pure.

#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "agno/types.hpp"

namespace agno::dynamics {

inline constexpr double kSingularDetThreshold = 1e-8;
inline constexpr double kMaxInertiaCondition = 1e8;
inline constexpr double kAttitudeGuard = deg2rad(85.0);

inline Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v(2), v(1),
       v(2), 0.0, -v(0),
       -v(1), v(0), 0.0;
  return s;
}

// Maps Euler-angle rates to body angular rates: omega = Theta(xi) * xi_dot.
inline Mat3 euler_rate_map(const EulerAngles& xi) {
  const double sp = std::sin(xi.phi), cp = std::cos(xi.phi);
  const double st = std::sin(xi.theta), ct = std::cos(xi.theta);
  Mat3 theta;
  theta << ct, 0.0, -st,
           0.0, 1.0, sp,
           st, 0.0, cp * ct;
  return theta;
}

inline double euler_rate_map_det(const EulerAngles& xi) {
  const double cp = std::cos(xi.phi);
  const double st = std::sin(xi.theta), ct = std::cos(xi.theta);
  return cp * ct * ct + st * st;
}

inline bool euler_rate_map_singular(const EulerAngles& xi) {
  return std::abs(euler_rate_map_det(xi)) < kSingularDetThreshold;
}

inline Mat3 inverse_euler_rate_map(const EulerAngles& xi) {
  if (euler_rate_map_singular(xi)) {
    throw SingularityError("Euler-rate map is singular at phi=" +
                           std::to_string(xi.phi) +
                           ", theta=" + std::to_string(xi.theta));
  }
  return euler_rate_map(xi).inverse();
}

// Analytic time derivative of euler_rate_map along xi_dot.
inline Mat3 euler_rate_map_dot(const EulerAngles& xi, const Vec3& xi_dot) {
  const double sp = std::sin(xi.phi), cp = std::cos(xi.phi);
  const double st = std::sin(xi.theta), ct = std::cos(xi.theta);
  const double dphi = xi_dot(0), dtheta = xi_dot(1);
  Mat3 d;
  d << -st * dtheta, 0.0, -ct * dtheta,
       0.0, 0.0, cp * dphi,
       ct * dtheta, 0.0, -sp * ct * dphi - cp * st * dtheta;
  return d;
}

// Body-to-inertial rotation, ZYX composition R = Rz(psi) Ry(theta) Rx(phi).
inline Mat3 rotation_matrix(const EulerAngles& xi) {
  const double sp = std::sin(xi.phi), cp = std::cos(xi.phi);
  const double st = std::sin(xi.theta), ct = std::cos(xi.theta);
  const double ss = std::sin(xi.psi), cs = std::cos(xi.psi);
  Mat3 r;
  r << cs * ct, cs * st * sp - ss * cp, cs * st * cp + ss * sp,
       ss * ct, ss * st * sp + cs * cp, ss * st * cp - cs * sp,
       -st, ct * sp, ct * cp;
  return r;
}

// J(xi) = Theta^T I Theta. This is the inertia used everywhere else.
inline Mat3 inertia_tensor(const EulerAngles& xi, const SystemParams& params) {
  const Mat3 theta = euler_rate_map(xi);
  return theta.transpose() * params.inertia() * theta;
}

// Entry-by-entry expansion as commonly printed for this model. Agrees with
// inertia_tensor when phi = 0 only; kept as a cross-check.
inline Mat3 inertia_tensor_closed_form(const EulerAngles& xi,
                                       const SystemParams& params) {
  const double ixx = params.I_body(0), iyy = params.I_body(1), izz = params.I_body(2);
  const double sp = std::sin(xi.phi), cp = std::cos(xi.phi);
  const double st = std::sin(xi.theta), ct = std::cos(xi.theta);
  const double j11 = ixx * ct * ct + izz * st * st;
  const double j13 = (izz - ixx) * cp * st * ct;
  const double j22 = iyy;
  const double j23 = iyy * sp;
  const double j33 = ixx * cp * cp * st * st + izz * cp * cp * ct * ct + iyy * sp * sp;
  Mat3 j;
  j << j11, 0.0, j13,
       0.0, j22, j23,
       j13, j23, j33;
  return j;
}

inline Mat3 inertia_tensor_rate(const EulerAngles& xi, const Vec3& xi_dot,
                                const SystemParams& params) {
  const Mat3 theta = euler_rate_map(xi);
  const Mat3 theta_dot = euler_rate_map_dot(xi, xi_dot);
  const Mat3 i = params.inertia();
  return theta_dot.transpose() * i * theta + theta.transpose() * i * theta_dot;
}

// Matrix C_r(xi, xi_dot) with C_r * xi_dot = J Theta_dot xi_dot
// + [Theta xi_dot]x (J_g Theta xi_dot). J_g is J(xi) by default, or the body
// inertia when params.gyroscopic == kBody.
inline Mat3 coriolis_matrix(const EulerAngles& xi, const Vec3& xi_dot,
                            const SystemParams& params) {
  const Mat3 theta = euler_rate_map(xi);
  const Mat3 j = theta.transpose() * params.inertia() * theta;
  const Mat3 jg = params.gyroscopic == GyroscopicInertia::kBody ? params.inertia() : j;
  const Vec3 omega = theta * xi_dot;
  return j * euler_rate_map_dot(xi, xi_dot) + skew(omega) * jg * theta;
}

inline Vec3 coriolis_term(const EulerAngles& xi, const Vec3& xi_dot,
                          const SystemParams& params) {
  return coriolis_matrix(xi, xi_dot, params) * xi_dot;
}

struct CompactMatrices {
  Mat6 M = Mat6::Zero();
  Mat6 C = Mat6::Zero();
  Vec6 G = Vec6::Zero();
  Mat64 A = Mat64::Zero();
};

inline CompactMatrices compact_matrices(const SystemState& state,
                                        const SystemParams& params) {
  CompactMatrices out;
  out.M.topLeftCorner<3, 3>() = params.m * Mat3::Identity();
  out.M.bottomRightCorner<3, 3>() = inertia_tensor(state.xi, params);
  out.C.bottomRightCorner<3, 3>() = coriolis_matrix(state.xi, state.xi_dot, params);
  out.G(2) = params.m * params.g;
  const Mat3 r = rotation_matrix(state.xi);
  out.A.block<3, 1>(0, 0) = -r.col(2);
  out.A.block<3, 3>(3, 1) = -r;
  return out;
}

// Time derivative of M along the motion: blkdiag(0, J_dot).
inline Mat6 inertia_matrix_rate(const SystemState& state, const SystemParams& params) {
  Mat6 m_dot = Mat6::Zero();
  m_dot.bottomRightCorner<3, 3>() = inertia_tensor_rate(state.xi, state.xi_dot, params);
  return m_dot;
}

inline double symmetric_condition(const Mat3& j) {
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(j, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues()(0), hi = eig.eigenvalues()(2);
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

// Spectral norm of M: max(m, lambda_max(J)).
inline double inertia_matrix_norm(const EulerAngles& xi, const SystemParams& params) {
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia_tensor(xi, params),
                                                Eigen::EigenvaluesOnly);
  return std::max(params.m, eig.eigenvalues()(2));
}

// Rejects attitudes outside the roll/pitch guard.
inline void check_attitude_guard(const EulerAngles& xi, double limit = kAttitudeGuard) {
  if (!xi.finite()) throw NonFiniteError("attitude is not finite");
  if (std::abs(xi.phi) >= limit || std::abs(xi.theta) >= limit) {
    throw SingularityError("attitude guard violated: |phi| or |theta| >= " +
                           std::to_string(rad2deg(limit)) + " deg (phi=" +
                           std::to_string(rad2deg(xi.phi)) + ", theta=" +
                           std::to_string(rad2deg(xi.theta)) + ")");
  }
}

// Generalized acceleration eta_ddot from M eta_ddot + C eta_dot + G + A u = T_ex.
inline Vec6 integrated_dynamics(const SystemState& state, const SystemParams& params,
                                const ControlInput& u, const Wrench& t_ex) {
  const CompactMatrices cm = compact_matrices(state, params);
  const Mat3 j = cm.M.bottomRightCorner<3, 3>();
  if (symmetric_condition(j) > kMaxInertiaCondition) {
    throw SingularityError("attitude-dependent inertia is ill-conditioned");
  }
  const Vec6 rhs = t_ex.stacked() - cm.C * state.eta_dot() - cm.G - cm.A * u.stacked();
  Vec6 acc;
  acc.head<3>() = rhs.head<3>() / params.m;
  acc.tail<3>() = j.ldlt().solve(rhs.tail<3>());
  return acc;
}

inline Wrench inverse_dynamics_wrench(const SystemState& state, const SystemParams& params,
                                      const ControlInput& u, const Vec6& eta_ddot) {
  const CompactMatrices cm = compact_matrices(state, params);
  return Wrench::from(cm.M * eta_ddot + cm.C * state.eta_dot() + cm.G + cm.A * u.stacked());
}

// Thrust that balances gravity for the given attitude (hover when level).
inline ControlInput gravity_balancing_input(const SystemParams& params) {
  return {params.m * params.g, Vec3::Zero()};
}

}  // namespace agno::dynamics
