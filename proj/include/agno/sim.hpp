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

// Fixed-step closed-loop simulation.
//
// Each control tick k (t_k = k dt_control) runs, in order:
//   1. measurement y_k = truth + noise(seed, k)
//   2. observer step over [t_{k-1}, t_k] with the input held on that interval
//   3. EKF predict with the same input, then update with y_k
//   4. tracking control on y_k against the reference, then allocation
//   5. log row k
//   6. admittance advances the reference to t_{k+1} with the chosen estimate
//   7. truth integrated with RK4 at dt_physics, input held, to t_{k+1}

#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "agno/allocation.hpp"
#include "agno/control.hpp"
#include "agno/dynamics.hpp"
#include "agno/ekf.hpp"
#include "agno/observer.hpp"
#include "agno/rng.hpp"
#include "agno/scenario.hpp"
#include "agno/stability.hpp"

namespace agno::sim {

// Which estimate drives the admittance reference.
enum class AdmittanceSource { kAgno, kEkf, kTruth, kNone };

struct EstimatorSet {
  bool agno = true;
  bool ekf = true;
};

struct RunConfig {
  SystemParams params{};
  observer::ObserverGains gains{};
  ekf::EkfNoise ekf_noise{};
  control::ControlGains control{};
  control::AdmittanceParams admittance{};
  Vec8 allocation_weights = Vec8::Ones();
  stability::Envelope envelope{};
  EstimatorSet estimators{};
  AdmittanceSource admittance_source = AdmittanceSource::kAgno;

  void validate() const {
    params.validate();
    gains.validate();
    ekf_noise.validate();
    control.validate();
    admittance.validate();
    envelope.validate();
    allocation_config().validate();
    if (!estimators.agno && !estimators.ekf) {
      throw ValidationError("at least one estimator must be selected");
    }
    if (admittance_source == AdmittanceSource::kAgno && !estimators.agno) {
      throw ValidationError("admittance source 'agno' needs the agno estimator");
    }
    if (admittance_source == AdmittanceSource::kEkf && !estimators.ekf) {
      throw ValidationError("admittance source 'ekf' needs the ekf estimator");
    }
  }

  allocation::AllocationConfig allocation_config() const {
    allocation::AllocationConfig cfg = allocation::AllocationConfig::from(params);
    cfg.d = allocation_weights;
    return cfg;
  }
};

inline constexpr int kSatQuad1 = 1;
inline constexpr int kSatQuad2 = 2;
inline constexpr int kSatThrust = 4;

struct RunRow {
  double t = 0.0;
  Vec6 eta = Vec6::Zero();
  Vec6 eta_dot = Vec6::Zero();
  Vec6 wrench_true = Vec6::Zero();
  Vec6 wrench_agno = Vec6::Zero();
  Vec6 wrench_ekf = Vec6::Zero();
  Vec8 u_q = Vec8::Zero();
  double V_e = 0.0;
  double k_eff = 0.0;
  int sat_flags = 0;
};

struct RunLog {
  std::string scenario;
  bool has_agno = true;
  bool has_ekf = true;
  double dt_control = 0.01;
  std::vector<RunRow> rows;
  stability::StabilityReport stability{};
  std::vector<std::string> warnings;
};

// One physics sub-step, reported before it is taken.
struct PhysicsSample {
  SystemState state;
  ControlInput u;
  Vec6 eta_ddot;
  Wrench wrench;
  Vec6 disturbance;
};

using PhysicsObserver = std::function<void(const PhysicsSample&)>;

inline SystemState measure(const SystemState& truth, const ekf::SensorNoise& noise,
                           std::uint64_t seed, std::uint64_t tick) {
  if (noise.is_zero()) return truth;
  const ekf::Vec12 n = noise.sigmas().cwiseProduct(rng::normal_vector<12>(seed, tick));
  return SystemState::from(truth.eta() + n.head<6>(), truth.eta_dot() + n.tail<6>(), truth.t);
}

namespace detail {

inline const char* source_name(AdmittanceSource s) {
  switch (s) {
    case AdmittanceSource::kAgno: return "agno";
    case AdmittanceSource::kEkf: return "ekf";
    case AdmittanceSource::kTruth: return "truth";
    case AdmittanceSource::kNone: return "none";
  }
  return "none";
}

using Vec12 = ekf::Vec12;

// RK4 over [t0, t0 + h] with u held; segments are selected at the midpoint.
inline SystemState physics_step(const SystemState& s, const ControlInput& u,
                                const scenario::ScenarioSpec& spec, const SystemParams& params,
                                double h) {
  const double t0 = s.t, t_mid = s.t + 0.5 * h;
  auto f = [&](double t, const Vec12& y) -> Vec12 {
    const SystemState x = SystemState::from(y.head<6>(), y.tail<6>(), t);
    const Wrench w = Wrench::from(spec.wrench_at(t, t_mid).stacked() - spec.disturbance_at(t));
    Vec12 dy;
    dy << y.tail<6>(), dynamics::integrated_dynamics(x, params, u, w);
    return dy;
  };
  Vec12 y0;
  y0 << s.eta(), s.eta_dot();
  const Vec12 k1 = f(t0, y0);
  const Vec12 k2 = f(t0 + 0.5 * h, y0 + 0.5 * h * k1);
  const Vec12 k3 = f(t0 + 0.5 * h, y0 + 0.5 * h * k2);
  const Vec12 k4 = f(t0 + h, y0 + h * k3);
  const Vec12 y1 = y0 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return SystemState::from(y1.head<6>(), y1.tail<6>(), t0 + h);
}

}  // namespace detail

inline RunLog run_scenario(const scenario::ScenarioSpec& spec, const RunConfig& cfg,
                           const PhysicsObserver& on_physics = {}) {
  spec.validate();
  cfg.validate();
  const SystemParams& params = cfg.params;
  const allocation::AllocationConfig acfg = cfg.allocation_config();
  const Mat48 gamma = allocation::build_gamma(acfg);
  const double dt = spec.dt_control;
  const int substeps = spec.substeps();
  const double h = dt / substeps;
  const long n_ticks = spec.ticks();

  RunLog log;
  log.scenario = spec.name;
  log.has_agno = cfg.estimators.agno;
  log.has_ekf = cfg.estimators.ekf;
  log.dt_control = dt;
  log.rows.reserve(static_cast<std::size_t>(n_ticks) + 1);
  log.stability = stability::stability_report(params, cfg.envelope, cfg.gains);
  if (!log.stability.warning.empty()) log.warnings.push_back(log.stability.warning);
  if (!log.stability.gain_condition_met) {
    log.warnings.push_back("observer gain condition 2 k_eff > gamma_hat is not met (k_eff = " +
                           std::to_string(log.stability.k_eff) + ", gamma_hat = " +
                           std::to_string(log.stability.gamma_hat) + ")");
  }

  SystemState truth = SystemState::from(spec.hover + spec.initial_offset, Vec6::Zero(), 0.0);
  const control::DesiredState desired = control::DesiredState::at_rest(spec.hover);
  control::ReferenceState ref = desired;
  observer::ObserverState obs;
  ekf::EkfState filt;
  ControlInput u_applied{};

  for (long k = 0; k <= n_ticks; ++k) {
    const double t_k = static_cast<double>(k) * dt;
    truth.t = t_k;
    const SystemState y = measure(truth, spec.noise, spec.seed, static_cast<std::uint64_t>(k));

    if (k == 0) {
      if (cfg.estimators.agno) obs = observer::initialize(y, params, cfg.gains);
      if (cfg.estimators.ekf) filt = ekf::initialize(y, cfg.ekf_noise);
    } else {
      if (cfg.estimators.agno) {
        obs = observer::observer_step(obs, y, u_applied, params, cfg.gains, dt);
      }
      if (cfg.estimators.ekf) {
        filt = ekf::ekf_predict(filt, u_applied, params, cfg.ekf_noise, dt);
        filt = ekf::ekf_update(filt, y, cfg.ekf_noise);
      }
    }

    const Wrench w_true = spec.wrench_at(t_k);
    Wrench drive{};
    switch (cfg.admittance_source) {
      case AdmittanceSource::kAgno: drive = obs.T_hat; break;
      case AdmittanceSource::kEkf: drive = filt.wrench(); break;
      case AdmittanceSource::kTruth: drive = w_true; break;
      case AdmittanceSource::kNone: break;
    }

    const control::TrackingOutput ctrl = control::tracking_control(y, ref, params, cfg.control);
    allocation::QuadInputs quads = allocation::allocate(ctrl.desired.stacked(), acfg);
    int flags = ctrl.saturated ? kSatThrust : 0;
    for (int j = 0; j < 2; ++j) {
      if (quads.saturated[j]) {
        flags |= (j == 0 ? kSatQuad1 : kSatQuad2);
        quads.u_q(4 * j) = std::clamp(quads.u_q(4 * j), 0.0, acfg.T_max);
      }
    }
    u_applied = ControlInput::from(gamma * quads.u_q);

    RunRow row;
    row.t = t_k;
    row.eta = truth.eta();
    row.eta_dot = truth.eta_dot();
    row.wrench_true = w_true.stacked();
    if (cfg.estimators.agno) {
      row.wrench_agno = obs.T_hat.stacked();
      row.k_eff = obs.gain;
      row.V_e = observer::lyapunov_value(row.wrench_agno - row.wrench_true, truth, params);
    }
    if (cfg.estimators.ekf) row.wrench_ekf = filt.wrench().stacked();
    row.u_q = quads.u_q;
    row.sat_flags = flags;
    log.rows.push_back(row);
    if (k == n_ticks) break;

    ref = control::admittance_step(ref, desired, drive, cfg.admittance, dt);

    for (int i = 0; i < substeps; ++i) {
      if (on_physics) {
        const Vec6 dist = spec.disturbance_at(truth.t);
        const Wrench w = spec.wrench_at(truth.t, truth.t + 0.5 * h);
        const Vec6 acc = dynamics::integrated_dynamics(
            truth, params, u_applied, Wrench::from(w.stacked() - dist));
        on_physics({truth, u_applied, acc, w, dist});
      }
      truth = detail::physics_step(truth, u_applied, spec, params, h);
      if (!truth.finite()) {
        throw NonFiniteError("simulation state became non-finite at t = " +
                             std::to_string(truth.t));
      }
      dynamics::check_attitude_guard(truth.xi);
    }
  }
  return log;
}

inline std::string admittance_source_name(AdmittanceSource s) { return detail::source_name(s); }

inline AdmittanceSource parse_admittance_source(const std::string& s) {
  if (s == "agno") return AdmittanceSource::kAgno;
  if (s == "ekf") return AdmittanceSource::kEkf;
  if (s == "truth") return AdmittanceSource::kTruth;
  if (s == "none") return AdmittanceSource::kNone;
  throw ValidationError("unknown admittance source '" + s + "' (expected agno|ekf|truth|none)");
}

}  // namespace agno::sim
