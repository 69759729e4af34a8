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

// Grid search for the EKF process noise on the smooth-motion scenario.
//
// The objective is the sum of per-channel wrench RMSE with forces scaled by
// 1 N and torques by 0.1 N m. The winning densities are the frozen defaults
// in include/agno/ekf.hpp; rerun after any change to the plant or sensors.
//
// usage: tune_ekf [--seed N] [--coarse]

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "agno/agno.hpp"

namespace {

struct Trial {
  double q_eta = 0.0;
  double q_force = 0.0;
  double q_torque = 0.0;
  double objective = std::numeric_limits<double>::infinity();
  agno::Vec6 rmse = agno::Vec6::Zero();
};

std::vector<double> decades(double lo, double hi, int per_decade) {
  std::vector<double> out;
  const int n = static_cast<int>(std::lround(std::log10(hi / lo) * per_decade));
  for (int i = 0; i <= n; ++i) out.push_back(lo * std::pow(10.0, static_cast<double>(i) / per_decade));
  return out;
}

Trial evaluate(const agno::scenario::ScenarioSpec& spec, double q_eta, double q_force,
               double q_torque) {
  agno::sim::RunConfig cfg;
  cfg.ekf_noise.Q_eta_dd = agno::Vec6::Constant(q_eta);
  cfg.ekf_noise.Q_wrench << q_force, q_force, q_force, q_torque, q_torque, q_torque;
  Trial t{q_eta, q_force, q_torque};
  try {
    const agno::sim::RunLog log = agno::sim::run_scenario(spec, cfg);
    const agno::metrics::MetricsReport rep = agno::metrics::compute_metrics(log);
    t.rmse = rep.find("ekf")->rmse;
    t.objective = t.rmse.head<3>().sum() + t.rmse.tail<3>().sum() / 0.1;
  } catch (const agno::Error& e) {
    std::fprintf(stderr, "  q_eta=%g q_f=%g q_t=%g failed: %s\n", q_eta, q_force, q_torque,
                 e.what());
  }
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tune the EKF process noise on the smooth-motion scenario"};
  std::uint64_t seed = agno::rng::kDefaultSeed;
  bool coarse = false;
  app.add_option("--seed", seed, "noise seed");
  app.add_flag("--coarse", coarse, "one point per decade");
  CLI11_PARSE(app, argc, argv);

  agno::scenario::ScenarioSpec spec = agno::scenario::smooth_motion();
  spec.seed = seed;
  const int per = coarse ? 1 : 2;

  Trial best;
  for (double q_eta : decades(1e-8, 1e-2, 1)) {
    for (double q_f : decades(1e-5, 1e1, per)) {
      for (double q_t : decades(1e-7, 1e-1, per)) {
        const Trial t = evaluate(spec, q_eta, q_f, q_t);
        std::printf("q_eta %8.1e  q_force %8.1e  q_torque %8.1e  J %9.5f  rmse", q_eta, q_f, q_t,
                    t.objective);
        for (int i = 0; i < 6; ++i) std::printf(" %8.5f", t.rmse(i));
        std::printf("\n");
        std::fflush(stdout);
        if (t.objective < best.objective) best = t;
      }
    }
  }
  std::printf("\nbest: Q_eta_dd = %.3g  Q_wrench = (%.3g x3, %.3g x3)  objective %.5f\n",
              best.q_eta, best.q_force, best.q_torque, best.objective);
  return std::isfinite(best.objective) ? 0 : 1;
}
