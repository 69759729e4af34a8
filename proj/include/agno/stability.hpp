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

// Numerical Lyapunov certificate for the wrench observer over an attitude
// and rate envelope.
//
// With V_e = e^T M e and B = K M^-1, dV_e/dt = -2 k e^T e + e^T M_dot e, so
// the error decays whenever 2 k_eff > gamma with gamma >= ||M_dot||_2. Under
// a model disturbance ||Delta|| <= eps the derivative is negative outside
// ||e|| = 2 k eps / (2 k - gamma); mapping that sphere through the level sets
// of V_e gives the reported ultimate bound
//   sqrt(lambda_max(M) / lambda_min(M)) * 2 k eps / (2 k - gamma).

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "agno/dynamics.hpp"
#include "agno/observer.hpp"

namespace agno::stability {

struct Envelope {
  double phi_max = deg2rad(30.0);
  double theta_max = deg2rad(30.0);
  double rate_max = 1.0;  // bound on ||xi_dot||, rad/s
  int attitude_points = 25;
  int direction_points = 48;

  bool is_static() const { return rate_max == 0.0; }

  void validate() const {
    if (phi_max < 0.0 || theta_max < 0.0 || rate_max < 0.0 ||
        !std::isfinite(phi_max + theta_max + rate_max)) {
      throw ValidationError("envelope bounds must be finite and non-negative");
    }
    if (attitude_points < 2 || direction_points < 2) {
      throw ValidationError("envelope grid needs at least 2 points per axis");
    }
    if (phi_max >= dynamics::kAttitudeGuard || theta_max >= dynamics::kAttitudeGuard) {
      throw ValidationError("envelope exceeds the attitude guard");
    }
  }
};

struct StabilityReport {
  double gamma_hat = 0.0;
  double gamma_hat_refined = 0.0;
  double k_eff = 0.0;
  double k_min_required = 0.0;
  double tau_c = 0.0;
  bool gain_condition_met = false;
  double ultimate_bound = std::numeric_limits<double>::infinity();
  double epsilon = 0.0;
  double lambda_max_M = 0.0;
  double lambda_min_M = 0.0;
  std::string warning;
};

// Envelope statistics at one grid resolution.
struct EnvelopeScan {
  double gamma = 0.0;
  double norm_M_min = std::numeric_limits<double>::infinity();
  double lambda_max = 0.0;
  double lambda_min = std::numeric_limits<double>::infinity();
};

// J_dot depends on (phi_dot, theta_dot) only, so the sup over the rate ball is
// attained on the circle phi_dot^2 + theta_dot^2 = rate_max^2; J_dot is linear
// in the rates and half the circle suffices.
inline EnvelopeScan scan_envelope(const SystemParams& params, const Envelope& env,
                                  int attitude_points, int direction_points) {
  EnvelopeScan scan;
  auto axis = [](double max, int n, int i) {
    return n == 1 ? 0.0 : -max + 2.0 * max * i / (n - 1);
  };
  for (int i = 0; i < attitude_points; ++i) {
    for (int j = 0; j < attitude_points; ++j) {
      const EulerAngles xi{axis(env.phi_max, attitude_points, i),
                           axis(env.theta_max, attitude_points, j), 0.0};
      const Eigen::SelfAdjointEigenSolver<Mat3> eig(dynamics::inertia_tensor(xi, params),
                                                    Eigen::EigenvaluesOnly);
      const double hi = std::max(params.m, eig.eigenvalues()(2));
      const double lo = std::min(params.m, eig.eigenvalues()(0));
      scan.norm_M_min = std::min(scan.norm_M_min, hi);
      scan.lambda_max = std::max(scan.lambda_max, hi);
      scan.lambda_min = std::min(scan.lambda_min, lo);
      if (env.rate_max == 0.0) continue;
      for (int d = 0; d < direction_points; ++d) {
        const double a = kPi * d / direction_points;
        const Vec3 rate{env.rate_max * std::cos(a), env.rate_max * std::sin(a), 0.0};
        const Mat3 j_dot = dynamics::inertia_tensor_rate(xi, rate, params);
        const Eigen::SelfAdjointEigenSolver<Mat3> ed(j_dot, Eigen::EigenvaluesOnly);
        const double norm = std::max(std::abs(ed.eigenvalues()(0)),
                                     std::abs(ed.eigenvalues()(2)));
        scan.gamma = std::max(scan.gamma, norm);
      }
    }
  }
  return scan;
}

// Smallest gain reachable inside the envelope: rest (eta_dot = 0) at the
// attitude of smallest ||M||.
inline double worst_case_gain(const observer::ObserverGains& gains, const EnvelopeScan& scan) {
  if (gains.mode == observer::GainMode::kFixed) return gains.k0;
  return gains.k0 + gains.k2 * scan.norm_M_min;
}

inline StabilityReport stability_report(const SystemParams& params, const Envelope& env,
                                        const observer::ObserverGains& gains,
                                        double epsilon = 0.5) {
  env.validate();
  gains.validate();
  const EnvelopeScan coarse =
      scan_envelope(params, env, env.attitude_points, env.direction_points);
  const EnvelopeScan fine =
      scan_envelope(params, env, 2 * env.attitude_points - 1, 2 * env.direction_points);

  StabilityReport rep;
  rep.gamma_hat = std::max(coarse.gamma, fine.gamma);
  rep.gamma_hat_refined = fine.gamma;
  if (coarse.gamma > 0.0 && std::abs(fine.gamma - coarse.gamma) > 0.05 * coarse.gamma) {
    rep.warning = "envelope grid too coarse: gamma_hat changed by more than 5% on refinement";
  }
  rep.k_eff = worst_case_gain(gains, fine);
  rep.k_min_required = rep.gamma_hat / 2.0;
  rep.lambda_max_M = fine.lambda_max;
  rep.lambda_min_M = fine.lambda_min;
  rep.tau_c = rep.lambda_max_M / rep.k_eff;
  rep.gain_condition_met = 2.0 * rep.k_eff > rep.gamma_hat;
  rep.epsilon = epsilon;
  if (rep.gain_condition_met) {
    rep.ultimate_bound = std::sqrt(rep.lambda_max_M / rep.lambda_min_M) * 2.0 * rep.k_eff *
                         epsilon / (2.0 * rep.k_eff - rep.gamma_hat);
  }
  return rep;
}

// Convergence time constant lambda_max(M) / k.
inline double time_constant(double lambda_max_M, double k) { return lambda_max_M / k; }

}  // namespace agno::stability
