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

// Accuracy and certificate metrics computed from a run log.

#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agno/scenario.hpp"
#include "agno/sim.hpp"

namespace agno::metrics {

inline constexpr double kDefaultSkip = 2.0;
inline constexpr double kLyapunovTolerance = 1e-8;

struct EstimatorMetrics {
  std::string name;
  Vec6 rmse = Vec6::Zero();
  Vec6 max_abs = Vec6::Zero();
  // Time after which |e| stays inside 5% of the channel peak plus a floor;
  // NaN when it never settles.
  Vec6 settling = Vec6::Constant(std::numeric_limits<double>::quiet_NaN());
};

struct LyapunovCount {
  int violations = 0;
  int intervals = 0;  // intervals eligible for the check
};

struct MetricsReport {
  std::string scenario;
  double t_skip = kDefaultSkip;
  std::size_t samples = 0;
  std::vector<EstimatorMetrics> estimators;
  LyapunovCount lyapunov{};
  bool gain_condition_met = false;
  double gamma_hat = 0.0;
  double k_eff = 0.0;
  double tau_c = 0.0;
  std::vector<std::string> warnings;

  const EstimatorMetrics* find(const std::string& name) const {
    for (const EstimatorMetrics& e : estimators) {
      if (e.name == name) return &e;
    }
    return nullptr;
  }
};

// Root mean square of the given samples.
inline double rms(const std::vector<double>& x) {
  if (x.empty()) throw ValidationError("rms of an empty sample");
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

// Counts ticks k where V_e(k+1) - V_e(k) > tol while the true wrench is the
// same at rows k-1, k and k+1.
inline LyapunovCount count_lyapunov_violations(const sim::RunLog& log,
                                               double tol = kLyapunovTolerance) {
  LyapunovCount c;
  if (!log.has_agno) return c;
  for (std::size_t k = 1; k + 1 < log.rows.size(); ++k) {
    const Vec6& w = log.rows[k].wrench_true;
    if (w != log.rows[k - 1].wrench_true || w != log.rows[k + 1].wrench_true) continue;
    ++c.intervals;
    if (log.rows[k + 1].V_e - log.rows[k].V_e > tol) ++c.violations;
  }
  return c;
}

namespace detail {

inline EstimatorMetrics estimator_metrics(const sim::RunLog& log, const std::string& name,
                                          Vec6 sim::RunRow::*column, double t_skip) {
  EstimatorMetrics m;
  m.name = name;
  Vec6 sq = Vec6::Zero();
  Vec6 peak = Vec6::Zero();
  std::size_t n = 0;
  for (const sim::RunRow& r : log.rows) {
    peak = peak.cwiseMax(r.wrench_true.cwiseAbs());
    if (r.t < t_skip - 1e-12) continue;
    const Vec6 e = r.*column - r.wrench_true;
    sq += e.cwiseAbs2();
    m.max_abs = m.max_abs.cwiseMax(e.cwiseAbs());
    ++n;
  }
  m.rmse = (sq / static_cast<double>(n)).cwiseSqrt();

  for (int c = 0; c < 6; ++c) {
    const double band = 0.05 * peak(c) + (c < 3 ? 0.05 : 0.01);
    double settled = 0.0;
    for (const sim::RunRow& r : log.rows) {
      if (std::abs((r.*column)(c) - r.wrench_true(c)) > band) {
        settled = std::numeric_limits<double>::quiet_NaN();
      } else if (std::isnan(settled)) {
        settled = r.t;
      }
    }
    m.settling(c) = settled;
  }
  return m;
}

inline nlohmann::json vec6(const Vec6& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < 6; ++i) {
    if (std::isfinite(v(i))) {
      a.push_back(v(i));
    } else {
      a.push_back(nullptr);
    }
  }
  return a;
}

}  // namespace detail

inline MetricsReport compute_metrics(const sim::RunLog& log, double t_skip = kDefaultSkip,
                                     double lyapunov_tol = kLyapunovTolerance) {
  std::size_t n = 0;
  for (const sim::RunRow& r : log.rows) {
    if (r.t >= t_skip - 1e-12) ++n;
  }
  if (n == 0) {
    throw ValidationError("metrics window is empty: no rows with t >= " + std::to_string(t_skip));
  }
  MetricsReport rep;
  rep.scenario = log.scenario;
  rep.t_skip = t_skip;
  rep.samples = n;
  if (log.has_agno) {
    rep.estimators.push_back(
        detail::estimator_metrics(log, "agno", &sim::RunRow::wrench_agno, t_skip));
  }
  if (log.has_ekf) {
    rep.estimators.push_back(
        detail::estimator_metrics(log, "ekf", &sim::RunRow::wrench_ekf, t_skip));
  }
  rep.lyapunov = count_lyapunov_violations(log, lyapunov_tol);
  rep.gain_condition_met = log.stability.gain_condition_met;
  rep.gamma_hat = log.stability.gamma_hat;
  rep.k_eff = log.stability.k_eff;
  rep.tau_c = log.stability.tau_c;
  rep.warnings = log.warnings;
  return rep;
}

inline nlohmann::json to_json(const MetricsReport& rep) {
  nlohmann::json est = nlohmann::json::object();
  for (const EstimatorMetrics& e : rep.estimators) {
    est[e.name] = {{"rmse", detail::vec6(e.rmse)},
                   {"max_abs_error", detail::vec6(e.max_abs)},
                   {"settling_time", detail::vec6(e.settling)}};
  }
  nlohmann::json channels = nlohmann::json::array();
  for (const std::string& a : scenario::kAxisNames) channels.push_back(a);
  return {{"scenario", rep.scenario},
          {"t_skip", rep.t_skip},
          {"samples", rep.samples},
          {"channels", channels},
          {"estimators", est},
          {"lyapunov", {{"violations", rep.lyapunov.violations},
                        {"intervals_checked", rep.lyapunov.intervals}}},
          {"stability", {{"gain_condition_met", rep.gain_condition_met},
                         {"gamma_hat", rep.gamma_hat},
                         {"k_eff", rep.k_eff},
                         {"tau_c", rep.tau_c}}},
          {"warnings", rep.warnings}};
}

inline std::string format_table(const MetricsReport& rep) {
  std::ostringstream os;
  char buf[160];
  os << "scenario " << rep.scenario << "  (t >= " << rep.t_skip << " s, " << rep.samples
     << " samples)\n";
  std::snprintf(buf, sizeof buf, "%-10s %-8s", "estimator", "metric");
  os << buf;
  for (const std::string& a : scenario::kAxisNames) {
    std::snprintf(buf, sizeof buf, " %10s", a.c_str());
    os << buf;
  }
  os << '\n';
  for (const EstimatorMetrics& e : rep.estimators) {
    for (int which = 0; which < 2; ++which) {
      const Vec6& v = which == 0 ? e.rmse : e.max_abs;
      std::snprintf(buf, sizeof buf, "%-10s %-8s", e.name.c_str(), which == 0 ? "rmse" : "max|e|");
      os << buf;
      for (int i = 0; i < 6; ++i) {
        std::snprintf(buf, sizeof buf, " %10.5f", v(i));
        os << buf;
      }
      os << '\n';
    }
  }
  os << "lyapunov violations: " << rep.lyapunov.violations << " / " << rep.lyapunov.intervals
     << " constant-wrench intervals\n";
  std::snprintf(buf, sizeof buf, "gain condition: %s (k_eff = %.4f, gamma_hat = %.4f, tau_c = %.4f s)\n",
                rep.gain_condition_met ? "met" : "NOT met", rep.k_eff, rep.gamma_hat, rep.tau_c);
  os << buf;
  for (const std::string& w : rep.warnings) os << "warning: " << w << '\n';
  return os.str();
}

}  // namespace agno::metrics
