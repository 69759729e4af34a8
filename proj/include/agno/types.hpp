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

#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "agno/errors.hpp"

namespace agno {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat64 = Eigen::Matrix<double, 6, 4>;
using Mat48 = Eigen::Matrix<double, 4, 8>;

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

// Roll, pitch, yaw.
struct EulerAngles {
  double phi = 0.0;
  double theta = 0.0;
  double psi = 0.0;

  Vec3 vec() const { return {phi, theta, psi}; }
  static EulerAngles from(const Vec3& v) { return {v(0), v(1), v(2)}; }
  bool finite() const {
    return std::isfinite(phi) && std::isfinite(theta) && std::isfinite(psi);
  }
};

// External wrench [f; mu], force and torque stacked.
struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();

  Vec6 stacked() const {
    Vec6 w;
    w << force, torque;
    return w;
  }
  static Wrench from(const Vec6& w) { return {w.head<3>(), w.tail<3>()}; }
  static Wrench zero() { return {}; }
  bool finite() const { return force.allFinite() && torque.allFinite(); }
};

// Total thrust along body z and body-frame torque: u = [T, tau].
struct ControlInput {
  double thrust = 0.0;
  Vec3 torque = Vec3::Zero();

  Vec4 stacked() const {
    Vec4 u;
    u << thrust, torque;
    return u;
  }
  static ControlInput from(const Vec4& u) { return {u(0), u.tail<3>()}; }
};

// Generalized configuration eta = [p, xi] and its rate.
struct SystemState {
  Vec3 p = Vec3::Zero();
  EulerAngles xi{};
  Vec3 p_dot = Vec3::Zero();
  Vec3 xi_dot = Vec3::Zero();
  double t = 0.0;

  Vec6 eta() const {
    Vec6 e;
    e << p, xi.vec();
    return e;
  }
  Vec6 eta_dot() const {
    Vec6 e;
    e << p_dot, xi_dot;
    return e;
  }
  static SystemState from(const Vec6& eta, const Vec6& eta_dot, double t) {
    SystemState s;
    s.p = eta.head<3>();
    s.xi = EulerAngles::from(eta.tail<3>());
    s.p_dot = eta_dot.head<3>();
    s.xi_dot = eta_dot.tail<3>();
    s.t = t;
    return s;
  }
  bool finite() const {
    return p.allFinite() && xi.finite() && p_dot.allFinite() &&
           xi_dot.allFinite() && std::isfinite(t);
  }
};

struct RotorParams {
  double k_t = 8.5e-6;   // N s^2
  double k_m = 1.36e-7;  // N m s^2
  double r = 0.2;        // m

  double varrho() const { return k_m / k_t; }

  void validate() const {
    if (!(k_t > 0.0) || !(k_m > 0.0) || !(r > 0.0)) {
      throw ValidationError("rotor: k_t, k_m and r must be positive");
    }
  }
};

// Which inertia enters the gyroscopic product of the Coriolis term.
enum class GyroscopicInertia { kEulerSpace, kBody };

struct SystemParams {
  double m = 3.9;
  double m_p = 1.5;
  double m_q1 = 1.2;
  double m_q2 = 1.2;
  Vec3 I_body{3.227, 0.061, 3.277};  // diagonal of the composite inertia
  Vec3 I_quad{0.02, 0.02, 0.04};     // diagonal of each quadrotor's inertia
  double g = 9.81;
  double L_p = 2.0;
  Vec3 s1{0.0, 1.0, 0.0};
  Vec3 s2{0.0, -1.0, 0.0};
  double T_max = 35.0;  // per UAV
  RotorParams rotor{};
  GyroscopicInertia gyroscopic = GyroscopicInertia::kEulerSpace;

  Mat3 inertia() const { return I_body.asDiagonal(); }

  // Payload inertia that makes the three rigid components compose exactly to
  // I_body (quadrotor inertias plus parallel-axis terms about the payload CoM).
  Mat3 payload_inertia() const {
    auto parallel_axis = [](double mass, const Vec3& s) -> Mat3 {
      return mass * (s.squaredNorm() * Mat3::Identity() - s * s.transpose());
    };
    const Mat3 quad = I_quad.asDiagonal();
    return inertia() - 2.0 * quad - parallel_axis(m_q1, s1) - parallel_axis(m_q2, s2);
  }

  void validate() const {
    if (!(m > 0.0) || !(m_p > 0.0) || !(m_q1 > 0.0) || !(m_q2 > 0.0)) {
      throw ValidationError("masses must be positive");
    }
    if (std::abs(m - (m_q1 + m_q2 + m_p)) > 1e-9 * m) {
      throw ValidationError("total mass m must equal m_q1 + m_q2 + m_p");
    }
    if ((I_body.array() <= 0.0).any() || !I_body.allFinite()) {
      throw ValidationError("I_body must be diagonal positive definite");
    }
    if (!s1.allFinite() || !s2.allFinite()) {
      throw ValidationError("geometry offsets s1, s2 must be finite");
    }
    if (!(g > 0.0) || !(T_max > 0.0)) {
      throw ValidationError("g and T_max must be positive");
    }
    rotor.validate();
  }

  static SystemParams table1() { return {}; }
};

}  // namespace agno
