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

// Command-line front end. Kept in a header so the tests can drive it
// in-process.
//
// Exit codes: 0 success, 1 stability condition not met (verify only),
// 2 usage, I/O or validation error, 3 simulation aborted.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "agno/agno.hpp"

namespace agno::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConditionUnmet = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitAbort = 3;

enum class Verbosity { kQuiet, kInfo, kDebug };

// AGNO_LOG=quiet|info|debug
inline Verbosity verbosity_from_env() {
  const char* v = std::getenv("AGNO_LOG");
  if (v == nullptr) return Verbosity::kInfo;
  const std::string s(v);
  if (s == "quiet") return Verbosity::kQuiet;
  if (s == "debug") return Verbosity::kDebug;
  return Verbosity::kInfo;
}

struct CliConfig {
  std::string subcommand;
  std::optional<std::string> params_path;
  std::string scenario = "coupled-force-torque";
  std::string out_dir = "agno_out";
  std::optional<std::uint64_t> seed;
  std::string estimators = "agno,ekf";
  std::optional<double> dt_control;
  std::string grid;
  std::string admittance_source = "agno";
  double t_skip = metrics::kDefaultSkip;
  int threads = 0;
};

// One sweep point; keys are k0, k1, k2 and noise (sensor noise scale).
using GridPoint = std::map<std::string, double>;

inline std::vector<GridPoint> parse_grid(const std::string& text) {
  static const std::vector<std::string> kKeys{"k0", "k1", "k2", "noise"};
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("grid entry '" + item + "' must look like key=v1,v2,...");
    }
    std::string key = item.substr(0, eq);
    key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      throw ValidationError("unknown grid key '" + key + "' (expected k0, k1, k2, noise)");
    }
    for (const auto& a : axes) {
      if (a.first == key) throw ValidationError("grid key '" + key + "' given twice");
    }
    std::vector<double> values;
    std::stringstream vs(item.substr(eq + 1));
    std::string v;
    while (std::getline(vs, v, ',')) {
      if (v.find_first_not_of(" \t") == std::string::npos) continue;
      char* end = nullptr;
      const double x = std::strtod(v.c_str(), &end);
      if (end == v.c_str() || !std::isfinite(x)) {
        throw ValidationError("grid value '" + v + "' for key '" + key + "' is not a number");
      }
      values.push_back(x);
    }
    if (values.empty()) throw ValidationError("grid key '" + key + "' has no values");
    axes.emplace_back(key, values);
  }
  if (axes.empty()) throw ValidationError("sweep grid is empty (use --grid \"k0=0.39,0.78\")");

  std::vector<GridPoint> points{GridPoint{}};
  for (const auto& [key, values] : axes) {
    std::vector<GridPoint> next;
    for (const GridPoint& p : points) {
      for (double v : values) {
        GridPoint q = p;
        q[key] = v;
        next.push_back(q);
      }
    }
    points = std::move(next);
  }
  std::sort(points.begin(), points.end());
  return points;
}

inline sim::EstimatorSet parse_estimators(const std::string& text) {
  sim::EstimatorSet set{false, false};
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    item = first == std::string::npos ? "" : item.substr(first, item.find_last_not_of(" \t") - first + 1);
    if (item == "agno") {
      set.agno = true;
    } else if (item == "ekf") {
      set.ekf = true;
    } else if (!item.empty()) {
      throw ValidationError("unknown estimator '" + item + "' (expected agno, ekf)");
    }
  }
  if (!set.agno && !set.ekf) throw ValidationError("--estimators selects nothing");
  return set;
}

class App {
 public:
  App(std::ostream& out, std::ostream& err) : out_(out), err_(err), verbosity_(verbosity_from_env()) {}

  int run(const CliConfig& c) {
    try {
      if (c.subcommand == "run") return cmd_run(c);
      if (c.subcommand == "verify") return cmd_verify(c);
      if (c.subcommand == "sweep") return cmd_sweep(c);
      if (c.subcommand == "compare") return cmd_compare(c);
      err_ << "error: unknown subcommand '" << c.subcommand << "'\n";
      return kExitUsage;
    } catch (const IoError& e) {
      err_ << "error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const ValidationError& e) {
      err_ << "error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const Error& e) {
      err_ << "aborted: " << e.what() << '\n';
      return kExitAbort;
    }
  }

 private:
  void info(const std::string& s) {
    if (verbosity_ != Verbosity::kQuiet) err_ << s << '\n';
  }
  void debug(const std::string& s) {
    if (verbosity_ == Verbosity::kDebug) err_ << s << '\n';
  }

  config::Config load(const CliConfig& c) {
    if (!c.params_path) return config::Config{};
    if (!std::filesystem::exists(*c.params_path)) {
      throw IoError("params file '" + *c.params_path + "' does not exist");
    }
    return config::load_config(*c.params_path);
  }

  scenario::ScenarioSpec scenario_for(const CliConfig& c, const config::Config& cfg) {
    const bool builtin = scenario::find_builtin(c.scenario).has_value();
    scenario::ScenarioSpec spec = config::resolve_scenario(c.scenario);
    if (builtin) spec.dt_control = cfg.t_s;
    if (c.dt_control) spec.dt_control = *c.dt_control;
    if (spec.dt_control < spec.dt_physics) spec.dt_physics = spec.dt_control;
    if (c.seed) spec.seed = *c.seed;
    spec.validate();
    return spec;
  }

  std::filesystem::path prepare_out(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
      throw IoError("cannot create output directory '" + dir + "'");
    }
    const std::filesystem::path probe = std::filesystem::path(dir) / ".agno_write_test";
    {
      std::ofstream f(probe);
      if (!f) throw IoError("output directory '" + dir + "' is not writable");
    }
    std::filesystem::remove(probe, ec);
    return dir;
  }

  static void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot write '" + p.string() + "'");
    f << text;
    if (!f) throw IoError("failed writing '" + p.string() + "'");
  }

  int cmd_run(const CliConfig& c) {
    config::Config cfg = load(c);
    cfg.run.estimators = parse_estimators(c.estimators);
    cfg.run.admittance_source = sim::parse_admittance_source(c.admittance_source);
    if (cfg.run.admittance_source == sim::AdmittanceSource::kAgno && !cfg.run.estimators.agno) {
      cfg.run.admittance_source = sim::AdmittanceSource::kEkf;
    }
    const scenario::ScenarioSpec spec = scenario_for(c, cfg);
    const std::filesystem::path out = prepare_out(c.out_dir);
    debug("running '" + spec.name + "' for " + std::to_string(spec.duration) + " s");

    const sim::RunLog log = sim::run_scenario(spec, cfg.run);
    for (const std::string& w : log.warnings) info("warning: " + w);
    const metrics::MetricsReport rep = metrics::compute_metrics(log, c.t_skip);

    const std::filesystem::path csv_path = out / (spec.name + ".csv");
    const std::filesystem::path json_path = out / (spec.name + "_metrics.json");
    write_text(csv_path, csv::to_string(log));
    write_text(json_path, metrics::to_json(rep).dump(2) + "\n");
    out_ << metrics::format_table(rep);
    out_ << "wrote " << csv_path.string() << " and " << json_path.string() << '\n';
    return kExitOk;
  }

  int cmd_verify(const CliConfig& c) {
    const config::Config cfg = load(c);
    if (c.params_path && !cfg.has_envelope) {
      throw ValidationError("params file '" + *c.params_path +
                            "' has no 'envelope' block; verify needs one");
    }
    const stability::StabilityReport rep =
        stability::stability_report(cfg.run.params, cfg.run.envelope, cfg.run.gains);
    const stability::Envelope& e = cfg.run.envelope;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "envelope: |phi| <= %.2f deg, |theta| <= %.2f deg, |xi_dot| <= %.3f rad/s\n",
                  rad2deg(e.phi_max), rad2deg(e.theta_max), e.rate_max);
    out_ << buf;
    std::snprintf(buf, sizeof buf, "gamma_hat      %.6f  (refined grid %.6f)\n", rep.gamma_hat,
                  rep.gamma_hat_refined);
    out_ << buf;
    std::snprintf(buf, sizeof buf, "k_eff          %.6f  (worst case, %s gain)\n", rep.k_eff,
                  cfg.run.gains.mode == observer::GainMode::kFixed ? "fixed" : "adaptive");
    out_ << buf;
    std::snprintf(buf, sizeof buf, "k_min          %.6f  (gamma_hat / 2)\n", rep.k_min_required);
    out_ << buf;
    std::snprintf(buf, sizeof buf, "tau_c          %.6f s\n", rep.tau_c);
    out_ << buf;
    if (rep.gain_condition_met) {
      std::snprintf(buf, sizeof buf, "ultimate bound %.6f  (||Delta|| <= %.3f)\n",
                    rep.ultimate_bound, rep.epsilon);
      out_ << buf;
    }
    if (!rep.warning.empty()) out_ << "warning: " << rep.warning << '\n';
    out_ << "condition 2 k_eff > gamma_hat: " << (rep.gain_condition_met ? "MET" : "NOT MET")
         << '\n';
    return rep.gain_condition_met ? kExitOk : kExitConditionUnmet;
  }

  struct SweepResult {
    GridPoint point;
    std::optional<metrics::MetricsReport> report;
    std::string error;
  };

  int cmd_sweep(const CliConfig& c) {
    const std::vector<GridPoint> points = parse_grid(c.grid);
    config::Config base = load(c);
    base.run.estimators = parse_estimators(c.estimators == "agno,ekf" ? "agno" : c.estimators);
    base.run.admittance_source = sim::parse_admittance_source(c.admittance_source);
    if (base.run.admittance_source == sim::AdmittanceSource::kAgno && !base.run.estimators.agno) {
      base.run.admittance_source = sim::AdmittanceSource::kEkf;
    }
    const scenario::ScenarioSpec base_spec = scenario_for(c, base);
    const std::filesystem::path out = prepare_out(c.out_dir);

    std::vector<SweepResult> results(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (std::size_t i = next++; i < points.size(); i = next++) {
        SweepResult& r = results[i];
        r.point = points[i];
        config::Config cfg = base;
        scenario::ScenarioSpec spec = base_spec;
        for (const auto& [key, v] : points[i]) {
          if (key == "k0") cfg.run.gains.k0 = v;
          if (key == "k1") cfg.run.gains.k1 = v;
          if (key == "k2") cfg.run.gains.k2 = v;
          if (key == "noise") spec.noise = ekf::SensorNoise{}.scaled(v);
        }
        try {
          r.report = metrics::compute_metrics(sim::run_scenario(spec, cfg.run), c.t_skip);
        } catch (const Error& e) {
          r.error = e.what();
        }
      }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_threads = c.threads > 0 ? static_cast<unsigned>(c.threads) : hw;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(n_threads, points.size()); ++t) {
      pool.emplace_back(worker);
    }
    for (std::thread& t : pool) t.join();

    std::ostringstream csv_out;
    csv_out << "k0,k1,k2,noise";
    const std::vector<std::string> names = [&] {
      std::vector<std::string> n;
      if (base.run.estimators.agno) n.push_back("agno");
      if (base.run.estimators.ekf) n.push_back("ekf");
      return n;
    }();
    for (const std::string& n : names) {
      for (const std::string& a : scenario::kAxisNames) csv_out << ",rmse_" << n << "_" << a;
    }
    csv_out << ",gain_condition_met,status\n";
    int failures = 0;
    for (const SweepResult& r : results) {
      const double k0 = r.point.count("k0") ? r.point.at("k0") : base.run.gains.k0;
      const double k1 = r.point.count("k1") ? r.point.at("k1") : base.run.gains.k1;
      const double k2 = r.point.count("k2") ? r.point.at("k2") : base.run.gains.k2;
      const double noise = r.point.count("noise") ? r.point.at("noise") : 1.0;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g", k0, k1, k2, noise);
      csv_out << buf;
      for (const std::string& n : names) {
        for (int i = 0; i < 6; ++i) {
          if (r.report) {
            std::snprintf(buf, sizeof buf, ",%.9g", r.report->find(n)->rmse(i));
            csv_out << buf;
          } else {
            csv_out << ",nan";
          }
        }
      }
      if (r.report) {
        csv_out << ',' << (r.report->gain_condition_met ? 1 : 0) << ",ok\n";
      } else {
        ++failures;
        csv_out << ",0,aborted\n";
        info("grid point aborted: " + r.error);
      }
    }
    const std::filesystem::path path = out / ("sweep_" + base_spec.name + ".csv");
    write_text(path, csv_out.str());
    out_ << csv_out.str();
    out_ << "wrote " << path.string() << " (" << results.size() << " points, " << failures
         << " aborted)\n";
    return failures == 0 ? kExitOk : kExitAbort;
  }

  int cmd_compare(const CliConfig& c) {
    config::Config cfg = load(c);
    cfg.run.estimators = {true, true};
    cfg.run.admittance_source = sim::parse_admittance_source(c.admittance_source);
    const scenario::ScenarioSpec spec = scenario_for(c, cfg);
    const std::filesystem::path out = prepare_out(c.out_dir);
    const sim::RunLog log = sim::run_scenario(spec, cfg.run);
    for (const std::string& w : log.warnings) info("warning: " + w);
    const metrics::MetricsReport rep = metrics::compute_metrics(log, c.t_skip);
    const Vec6& a = rep.find("agno")->rmse;
    const Vec6& e = rep.find("ekf")->rmse;

    char buf[128];
    out_ << "scenario " << spec.name << ": RMSE after t = " << c.t_skip << " s\n";
    std::snprintf(buf, sizeof buf, "%-8s %12s %12s %12s %s\n", "channel", "agno", "ekf",
                  "agno/ekf", "better");
    out_ << buf;
    nlohmann::json channels = nlohmann::json::object();
    for (int i = 0; i < 6; ++i) {
      const double ratio = e(i) > 0.0 ? a(i) / e(i) : std::numeric_limits<double>::infinity();
      std::snprintf(buf, sizeof buf, "%-8s %12.6f %12.6f %12.4f %s\n",
                    scenario::kAxisNames[i].c_str(), a(i), e(i), ratio,
                    a(i) <= e(i) ? "agno" : "ekf");
      out_ << buf;
      channels[scenario::kAxisNames[i]] = {{"agno", a(i)}, {"ekf", e(i)}, {"ratio", ratio}};
    }
    const nlohmann::json doc{{"scenario", spec.name}, {"t_skip", c.t_skip}, {"rmse", channels},
                             {"metrics", metrics::to_json(rep)}};
    const std::filesystem::path path = out / (spec.name + "_compare.json");
    write_text(path, doc.dump(2) + "\n");
    out_ << "wrote " << path.string() << '\n';
    return kExitOk;
  }

  std::ostream& out_;
  std::ostream& err_;
  Verbosity verbosity_;
};

// Parses argv-style arguments (without the program name) and runs.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Adaptive gain nonlinear wrench observer: simulate, sweep, verify, compare"};
  app.require_subcommand(1);
  CliConfig c;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--params", c.params_path, "SystemParams JSON file");
    sub->add_option("--scenario", c.scenario, "built-in scenario name or scenario JSON path");
    sub->add_option("--out", c.out_dir, "output directory");
    sub->add_option("--seed", c.seed, "noise seed (default 42)");
    sub->add_option("--dt-control", c.dt_control, "control/estimation step [s]");
    sub->add_option("--admittance-source", c.admittance_source,
                    "estimate driving the admittance: agno|ekf|truth|none");
    sub->add_option("--t-skip", c.t_skip, "transient excluded from metrics [s]");
  };
  CLI::App* run = app.add_subcommand("run", "simulate one scenario, write CSV log and metrics");
  add_common(run);
  run->add_option("--estimators", c.estimators, "comma list from {agno, ekf}");
  CLI::App* sweep = app.add_subcommand("sweep", "RMSE over a grid of observer gains / noise");
  add_common(sweep);
  sweep->add_option("--estimators", c.estimators, "comma list from {agno, ekf} (default agno)");
  sweep->add_option("--grid", c.grid, "e.g. \"k0=0.39,0.78,1.56;noise=0,1\"")->required();
  sweep->add_option("--threads", c.threads, "worker threads (default: hardware)");
  CLI::App* verify = app.add_subcommand("verify", "check 2 k_eff > gamma_hat over the envelope");
  verify->add_option("--params", c.params_path, "SystemParams JSON with an envelope block");
  CLI::App* compare = app.add_subcommand("compare", "AGNO vs EKF RMSE on one scenario");
  add_common(compare);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  for (CLI::App* sub : {run, sweep, verify, compare}) {
    if (sub->parsed()) c.subcommand = sub->get_name();
  }
  if (c.grid.empty() && c.subcommand == "sweep") {
    err << "error: sweep grid is empty\n";
    return kExitUsage;
  }
  return App(out, err).run(c);
}

}  // namespace agno::cli
