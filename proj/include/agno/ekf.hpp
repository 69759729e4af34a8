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

// Extended Kalman filter baseline over x = [eta; eta_dot; T_ex] with a
// random-walk wrench model and (eta, eta_dot) measurements.

#pragma once

#include "agno/dynamics.hpp"
#include "agno/types.hpp"

namespace agno::ekf {

using Vec12 = Eigen::Matrix<double, 12, 1>;
using Vec18 = Eigen::Matrix<double, 18, 1>;
using Mat12 = Eigen::Matrix<double, 12, 12>;
using Mat18 = Eigen::Matrix<double, 18, 18>;

inline constexpr double kJacobianStep = 1e-6;
inline constexpr double kMaxCovarianceTrace = 1e9;

// Standard deviations of the motion-capture style measurements.
struct SensorNoise {
  double sigma_pos = 0.005;                   // m
  double sigma_att = deg2rad(0.2);            // rad
  double sigma_vel = 0.01;                    // m/s
  double sigma_rate = deg2rad(0.05);          // rad/s

  SensorNoise scaled(double s) const {
    return {sigma_pos * s, sigma_att * s, sigma_vel * s, sigma_rate * s};
  }
  bool is_zero() const {
    return sigma_pos == 0.0 && sigma_att == 0.0 && sigma_vel == 0.0 && sigma_rate == 0.0;
  }
  Vec12 sigmas() const {
    Vec12 s;
    s << Vec3::Constant(sigma_pos), Vec3::Constant(sigma_att), Vec3::Constant(sigma_vel),
        Vec3::Constant(sigma_rate);
    return s;
  }
};

// Process PSDs and measurement variances. Defaults were tuned once on the
// smooth-motion scenario (tools/tune_ekf) and are frozen.
struct EkfNoise {
  Vec6 Q_eta_dd = Vec6::Constant(1e-8);
  Vec6 Q_wrench = (Vec6() << 1e-2, 1e-2, 1e-2, 1e-5, 1e-5, 1e-5).finished();
  Vec12 R_meas = SensorNoise{}.sigmas().array().square();
  // Prior standard deviation of the wrench block.
  Vec6 wrench_prior_sigma = (Vec6() << 5.0, 5.0, 5.0, 1.0, 1.0, 1.0).finished();

  void validate() const {
    if ((Q_eta_dd.array() < 0.0).any() || (Q_wrench.array() < 0.0).any() ||
        (R_meas.array() < 0.0).any() || (wrench_prior_sigma.array() < 0.0).any()) {
      throw ValidationError("ekf noise parameters must be non-negative");
    }
  }

  static EkfNoise with_sensor(const SensorNoise& sensor) {
    EkfNoise n;
    n.R_meas = sensor.sigmas().array().square();
    return n;
  }
};

struct EkfState {
  Vec18 x = Vec18::Zero();
  Mat18 P = Mat18::Identity();
  double t = 0.0;
  Vec12 innovation = Vec12::Zero();

  SystemState system_state() const {
    return SystemState::from(x.segment<6>(0), x.segment<6>(6), t);
  }
  Wrench wrench() const { return Wrench::from(x.segment<6>(12)); }
  Mat6 wrench_covariance() const { return P.block<6, 6>(12, 12); }
};

inline Vec12 measurement_vector(const SystemState& s) {
  Vec12 y;
  y << s.eta(), s.eta_dot();
  return y;
}

inline EkfState initialize(const SystemState& measured, const EkfNoise& noise) {
  noise.validate();
  EkfState ekf;
  ekf.x.head<12>() = measurement_vector(measured);
  ekf.P.setZero();
  for (int i = 0; i < 12; ++i) ekf.P(i, i) = std::max(noise.R_meas(i), 1e-12);
  for (int i = 0; i < 6; ++i) {
    ekf.P(12 + i, 12 + i) = noise.wrench_prior_sigma(i) * noise.wrench_prior_sigma(i);
  }
  ekf.t = measured.t;
  return ekf;
}

// One RK4 step of the process model with the wrench held constant.
inline Vec18 process_model(const Vec18& x, const ControlInput& u, const SystemParams& params,
                           double dt) {
  const Wrench w = Wrench::from(x.segment<6>(12));
  auto f = [&](const Vec12& y) -> Vec12 {
    const SystemState s = SystemState::from(y.head<6>(), y.tail<6>(), 0.0);
    Vec12 dy;
    dy << y.tail<6>(), dynamics::integrated_dynamics(s, params, u, w);
    return dy;
  };
  const Vec12 y0 = x.head<12>();
  const Vec12 k1 = f(y0);
  const Vec12 k2 = f(y0 + 0.5 * dt * k1);
  const Vec12 k3 = f(y0 + 0.5 * dt * k2);
  const Vec12 k4 = f(y0 + dt * k3);
  Vec18 out = x;
  out.head<12>() = y0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return out;
}

// Central-difference Jacobian of the discrete process model.
inline Mat18 process_jacobian(const Vec18& x, const ControlInput& u, const SystemParams& params,
                              double dt, double h = kJacobianStep) {
  Mat18 F;
  for (int i = 0; i < 18; ++i) {
    Vec18 xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    F.col(i) = (process_model(xp, u, params, dt) - process_model(xm, u, params, dt)) / (2.0 * h);
  }
  return F;
}

// Analytic d(eta_ddot)/d(T_ex) = M^-1, the cross-check for the wrench block.
inline Mat6 wrench_jacobian(const SystemState& s, const SystemParams& params) {
  const dynamics::CompactMatrices cm = dynamics::compact_matrices(s, params);
  return cm.M.inverse();
}

// Discrete process noise: white acceleration noise on each generalized
// coordinate plus a random walk on the wrench.
inline Mat18 discrete_process_noise(const EkfNoise& noise, double dt) {
  Mat18 q = Mat18::Zero();
  for (int i = 0; i < 6; ++i) {
    const double a = noise.Q_eta_dd(i);
    q(i, i) = a * dt * dt * dt / 3.0;
    q(i, 6 + i) = q(6 + i, i) = a * dt * dt / 2.0;
    q(6 + i, 6 + i) = a * dt;
    q(12 + i, 12 + i) = noise.Q_wrench(i) * dt;
  }
  return q;
}

inline void check_covariance(const Mat18& P) {
  if (!P.allFinite() || P.trace() > kMaxCovarianceTrace) {
    throw CovarianceError("ekf covariance blew up (trace " + std::to_string(P.trace()) + ")");
  }
}

inline EkfState ekf_predict(const EkfState& ekf, const ControlInput& u,
                            const SystemParams& params, const EkfNoise& noise, double dt) {
  if (!(dt > 0.0)) throw ValidationError("ekf_predict: dt must be positive");
  dynamics::check_attitude_guard(ekf.system_state().xi);
  EkfState next = ekf;
  const Mat18 F = process_jacobian(ekf.x, u, params, dt);
  next.x = process_model(ekf.x, u, params, dt);
  next.P = F * ekf.P * F.transpose() + discrete_process_noise(noise, dt);
  next.P = 0.5 * (next.P + next.P.transpose());
  next.t = ekf.t + dt;
  check_covariance(next.P);
  return next;
}

// Joseph-form update with H = [I12, 0].
inline EkfState ekf_update(const EkfState& ekf, const SystemState& measured,
                           const EkfNoise& noise) {
  const Mat12 R = noise.R_meas.asDiagonal();
  const Mat12 S = ekf.P.topLeftCorner<12, 12>() + R;
  const Eigen::LDLT<Mat12> ldlt(S);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 0.0).all()) {
    throw SingularityError("ekf innovation covariance is singular");
  }
  const Eigen::Matrix<double, 18, 12> PHt = ekf.P.leftCols<12>();
  const Eigen::Matrix<double, 18, 12> K = ldlt.solve(PHt.transpose()).transpose();

  EkfState next = ekf;
  next.innovation = measurement_vector(measured) - ekf.x.head<12>();
  next.x = ekf.x + K * next.innovation;
  Mat18 IKH = Mat18::Identity();
  IKH.leftCols<12>() -= K;
  next.P = IKH * ekf.P * IKH.transpose() + K * R * K.transpose();
  next.P = 0.5 * (next.P + next.P.transpose());
  check_covariance(next.P);
  return next;
}

// Normalized estimation error squared of the wrench block.
inline double wrench_nees(const EkfState& ekf, const Wrench& truth) {
  const Vec6 e = truth.stacked() - ekf.x.segment<6>(12);
  return e.dot(ekf.wrench_covariance().ldlt().solve(e));
}

}  // namespace agno::ekf
