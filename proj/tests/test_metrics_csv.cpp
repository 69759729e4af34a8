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


#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "agno/csv.hpp"
#include "agno/metrics.hpp"

namespace agno::metrics {
namespace {

sim::RunLog synthetic(bool agno, bool ekf, int n = 500) {
  sim::RunLog log;
  log.scenario = "synthetic";
  log.has_agno = agno;
  log.has_ekf = ekf;
  for (int k = 0; k < n; ++k) {
    sim::RunRow r;
    r.t = 0.01 * k;
    r.wrench_true = Vec6::Constant(1.0);
    r.wrench_agno = r.wrench_true + Vec6::Constant(k % 2 ? 0.1 : -0.1);
    r.wrench_ekf = r.wrench_true + Vec6::Constant(0.2);
    r.V_e = std::exp(-0.01 * k);
    r.k_eff = 2.145;
    r.eta(2) = 1.0 + 1e-7 * k;
    r.u_q(0) = 19.1295;
    r.sat_flags = k % 3;
    log.rows.push_back(r);
  }
  return log;
}

TEST(Rms, Examples) {
  EXPECT_NEAR(rms({1.0, -1.0, 1.0}), 1.0, 1e-15);
  EXPECT_NEAR(rms({3.0, 0.0, 0.0}), std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(rms({0.5, 0.5, 0.5, 0.5}), 0.5, 1e-15);
  EXPECT_THROW(rms({}), ValidationError);
}

TEST(Metrics, RmseOfKnownErrors) {
  const MetricsReport rep = compute_metrics(synthetic(true, true), 0.0);
  EXPECT_EQ(rep.samples, 500u);
  EXPECT_NEAR(rep.find("agno")->rmse(0), 0.1, 1e-12);
  EXPECT_NEAR(rep.find("ekf")->rmse(5), 0.2, 1e-12);  // pure bias
  EXPECT_NEAR(rep.find("ekf")->max_abs(3), 0.2, 1e-12);
  EXPECT_EQ(rep.find("none"), nullptr);
}

TEST(Metrics, SkipWindowAndEmptyWindow) {
  const MetricsReport rep = compute_metrics(synthetic(true, false), 2.0);
  EXPECT_EQ(rep.samples, 300u);
  EXPECT_THROW(compute_metrics(synthetic(true, false), 100.0), ValidationError);
}

TEST(Metrics, SettlingTime) {
  sim::RunLog log = synthetic(true, false);
  for (sim::RunRow& r : log.rows) r.wrench_agno = r.wrench_true * (1.0 - std::exp(-r.t));
  const MetricsReport rep = compute_metrics(log, 0.0);
  // Band on forces is 0.05 * 1 + 0.05 = 0.1, reached when exp(-t) <= 0.1.
  EXPECT_NEAR(rep.find("agno")->settling(0), std::log(10.0), 0.011);
  // Torque band 0.06.
  EXPECT_NEAR(rep.find("agno")->settling(3), -std::log(0.06), 0.011);
}

TEST(Metrics, LyapunovViolationsOnlyCountConstantWrench) {
  sim::RunLog log = synthetic(true, false, 10);
  log.rows[5].V_e = 10.0;  // rise from row 4 to 5
  EXPECT_EQ(count_lyapunov_violations(log).violations, 1);
  EXPECT_EQ(count_lyapunov_violations(log).intervals, 8);
  log.rows[5].wrench_true(0) = 0.0;  // rows 4, 5, 6 no longer qualify
  const LyapunovCount c = count_lyapunov_violations(log);
  EXPECT_EQ(c.violations, 0);
  EXPECT_EQ(c.intervals, 5);
}

TEST(Metrics, JsonAndTable) {
  const MetricsReport rep = compute_metrics(synthetic(true, true), 0.0);
  const nlohmann::json j = to_json(rep);
  EXPECT_EQ(j["channels"].size(), 6u);
  EXPECT_NEAR(j["estimators"]["agno"]["rmse"][2].get<double>(), 0.1, 1e-12);
  EXPECT_TRUE(j["estimators"].contains("ekf"));
  const std::string table = format_table(rep);
  EXPECT_NE(table.find("lyapunov violations"), std::string::npos);
}

TEST(Csv, HeaderLayout) {
  const std::vector<std::string> full = csv::header(true, true);
  EXPECT_EQ(full.size(), 13u + 18u + 8u + 3u);
  EXPECT_EQ(full.front(), "t");
  EXPECT_EQ(full.back(), "sat_flags");
  const std::vector<std::string> agno = csv::header(true, false);
  EXPECT_EQ(std::count(agno.begin(), agno.end(), "ekf_fx"), 0);
  const std::vector<std::string> ekf = csv::header(false, true);
  EXPECT_EQ(std::count(ekf.begin(), ekf.end(), "V_e"), 0);
}

TEST(Csv, ByteRoundTrip) {
  for (auto [a, e] : {std::pair{true, true}, std::pair{true, false}, std::pair{false, true}}) {
    const std::string text = csv::to_string(synthetic(a, e));
    const sim::RunLog back = csv::parse_string(text);
    EXPECT_EQ(back.has_agno, a);
    EXPECT_EQ(back.has_ekf, e);
    EXPECT_EQ(csv::to_string(back), text);
  }
}

TEST(Csv, NineSignificantDigits) {
  sim::RunLog log = synthetic(true, false, 1);
  log.rows[0].t = 1.0 / 3.0;
  const std::string text = csv::to_string(log);
  EXPECT_NE(text.find("\n0.333333333,"), std::string::npos);
}

TEST(Csv, RejectsMalformed) {
  EXPECT_THROW(csv::parse_string(""), ValidationError);
  EXPECT_THROW(csv::parse_string("t,x\n1,2\n"), ValidationError);
  std::string text = csv::to_string(synthetic(true, false, 2));
  text += "1,2,3\n";
  EXPECT_THROW(csv::parse_string(text), ValidationError);
}

}  // namespace
}  // namespace agno::metrics
