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


// Runs the step-wrench scenario and prints how fast each estimator locks on.

#include <cstdio>

#include "agno/agno.hpp"

int main() {
  using namespace agno;
  sim::RunConfig cfg;
  const scenario::ScenarioSpec spec = scenario::step_wrench();
  const sim::RunLog log = sim::run_scenario(spec, cfg);
  const metrics::MetricsReport rep = metrics::compute_metrics(log);
  std::printf("%s", metrics::format_table(rep).c_str());

  std::printf("\n  t [s]   true fz   agno fz    ekf fz\n");
  for (std::size_t k = 0; k < log.rows.size(); k += 100) {
    const sim::RunRow& r = log.rows[k];
    std::printf("%7.2f %9.4f %9.4f %9.4f\n", r.t, r.wrench_true(2), r.wrench_agno(2),
                r.wrench_ekf(2));
  }
  std::printf("\npredicted force-channel time constant m / k_eff = %.3f s\n",
              cfg.params.m / log.rows.back().k_eff);
  return 0;
}
