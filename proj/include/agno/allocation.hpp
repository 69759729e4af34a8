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

// Weighted minimum-norm split of [T, tau] across the two quadrotors.

#pragma once

#include <array>

#include "agno/types.hpp"

namespace agno::allocation {

inline constexpr double kMaxNormalCondition = 1e10;

struct AllocationConfig {
  Vec3 s1{0.0, 1.0, 0.0};
  Vec3 s2{0.0, -1.0, 0.0};
  // d11..d14, d21..d24
  Vec8 d = Vec8::Ones();
  double T_max = 35.0;

  void validate() const {
    if ((d.array() <= 0.0).any() || !d.allFinite()) {
      throw ValidationError("allocation weights must be positive");
    }
    if (!s1.allFinite() || !s2.allFinite()) {
      throw ValidationError("allocation geometry must be finite");
    }
  }

  static AllocationConfig from(const SystemParams& params) {
    AllocationConfig cfg;
    cfg.s1 = params.s1;
    cfg.s2 = params.s2;
    cfg.T_max = params.T_max;
    return cfg;
  }
};

// u_q = [T_q1, tau11, tau12, tau13, T_q2, tau21, tau22, tau23]
struct QuadInputs {
  Vec8 u_q = Vec8::Zero();
  std::array<bool, 2> saturated{false, false};

  double thrust(int j) const { return u_q(4 * j); }
  Vec3 torque(int j) const { return u_q.segment<3>(4 * j + 1); }
  bool any_saturated() const { return saturated[0] || saturated[1]; }
};

inline Mat48 build_gamma_unchecked(const AllocationConfig& cfg) {
  Mat48 g = Mat48::Zero();
  g(0, 0) = 1.0;
  g(0, 4) = 1.0;
  g(1, 0) = cfg.s1(1);
  g(1, 1) = 1.0;
  g(1, 4) = cfg.s2(1);
  g(1, 5) = 1.0;
  g(2, 0) = -cfg.s1(0);
  g(2, 2) = 1.0;
  g(2, 4) = -cfg.s2(0);
  g(2, 6) = 1.0;
  g(3, 3) = 1.0;
  g(3, 7) = 1.0;
  return g;
}

inline Mat48 build_gamma(const AllocationConfig& cfg) {
  const Mat48 g = build_gamma_unchecked(cfg);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
  if (lu.rank() < 4) {
    throw RankDeficiencyError("allocation matrix has rank " + std::to_string(lu.rank()) +
                              " < 4");
  }
  return g;
}

// Weighted cost sum_j d_j1 T_qj^2 + d_j2 tau_j1^2 + d_j3 tau_j2^2 + d_j4 tau_j3^2.
inline double allocation_cost(const Vec8& u_q, const AllocationConfig& cfg) {
  return (cfg.d.array() * u_q.array().square()).sum();
}

// Weighting matrix O = sqrt(diag(d)); the cost equals ||O u_q||^2.
inline Eigen::Matrix<double, 8, 8> weight_matrix(const AllocationConfig& cfg) {
  return cfg.d.cwiseSqrt().asDiagonal();
}

// u* = O^-2 Gamma^T (Gamma O^-2 Gamma^T)^-1 w
inline QuadInputs allocate(const Vec4& desired, const AllocationConfig& cfg) {
  const Mat48 gamma = build_gamma(cfg);
  const Vec8 d_inv = cfg.d.cwiseInverse();
  const Eigen::Matrix<double, 8, 4> weighted_t = d_inv.asDiagonal() * gamma.transpose();
  const Mat4 normal = gamma * weighted_t;

  const Eigen::JacobiSVD<Mat4> svd(normal);
  const auto& sv = svd.singularValues();
  if (!(sv(3) > 0.0) || sv(0) / sv(3) > kMaxNormalCondition) {
    throw SingularityError("allocation normal equations are singular");
  }
  QuadInputs out;
  out.u_q = weighted_t * normal.ldlt().solve(desired);
  for (int j = 0; j < 2; ++j) {
    const double t = out.thrust(j);
    out.saturated[j] = t < 0.0 || t > cfg.T_max;
  }
  return out;
}

}  // namespace agno::allocation
