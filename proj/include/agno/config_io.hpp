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

// SystemParams JSON: flat physical/gain keys plus optional blocks. See
// docs/params.md for the schema.

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "agno/scenario.hpp"
#include "agno/sim.hpp"

namespace agno::config {

struct Config {
  sim::RunConfig run{};
  double t_s = 0.01;  // control step
  bool has_envelope = false;
};

namespace detail {

using scenario::detail::check_keys;
using scenario::detail::get_or;
using scenario::detail::json_vec;
using scenario::detail::vec_json;

// Scalar (times identity), 6-array (diagonal) or 6x6 nested array.
inline Mat6 json_mat6(const nlohmann::json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>() * Mat6::Identity();
  if (j.is_array() && j.size() == 6 && j[0].is_number()) {
    return json_vec<6>(j, what).asDiagonal();
  }
  if (j.is_array() && j.size() == 6) {
    Mat6 m;
    for (int r = 0; r < 6; ++r) m.row(r) = json_vec<6>(j[r], what).transpose();
    return m;
  }
  throw ValidationError(what + ": expected a number, 6 numbers or a 6x6 array");
}

inline nlohmann::json mat6_json(const Mat6& m) {
  if (m.isDiagonal()) {
    const Vec6 d = m.diagonal();
    if ((d.array() == d(0)).all()) return d(0);
    return vec_json<6>(d);
  }
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < 6; ++r) rows.push_back(vec_json<6>(m.row(r).transpose()));
  return rows;
}

}  // namespace detail

inline Config config_from_json(const nlohmann::json& j) {
  using namespace detail;
  const std::string where = "params";
  check_keys(j, {"m", "L_p", "g", "I_xx", "I_yy", "I_zz", "k0", "k1", "k2", "T_max", "t_s", "M_a",
                 "B_a", "K_a", "rotor", "geometry", "allocation", "observer", "ekf", "control",
                 "envelope"},
             where);
  Config cfg;
  SystemParams& p = cfg.run.params;
  const SystemParams d{};

  const nlohmann::json geo = j.value("geometry", nlohmann::json::object());
  check_keys(geo, {"m_p", "m_q1", "m_q2", "I_quad", "s1", "s2", "gyroscopic"}, "params.geometry");

  p.m = get_or(j, "m", d.m, where);
  const double mass_scale = p.m / d.m;
  p.m_p = get_or(geo, "m_p", d.m_p * mass_scale, "params.geometry");
  p.m_q1 = get_or(geo, "m_q1", d.m_q1 * mass_scale, "params.geometry");
  p.m_q2 = get_or(geo, "m_q2", d.m_q2 * mass_scale, "params.geometry");
  p.L_p = get_or(j, "L_p", d.L_p, where);
  p.s1 = geo.contains("s1") ? json_vec<3>(geo["s1"], "params.geometry.s1")
                            : Vec3(0.0, 0.5 * p.L_p, 0.0);
  p.s2 = geo.contains("s2") ? json_vec<3>(geo["s2"], "params.geometry.s2")
                            : Vec3(0.0, -0.5 * p.L_p, 0.0);
  if (geo.contains("I_quad")) p.I_quad = json_vec<3>(geo["I_quad"], "params.geometry.I_quad");
  const std::string gyro = get_or<std::string>(geo, "gyroscopic", "euler", "params.geometry");
  if (gyro == "euler") {
    p.gyroscopic = GyroscopicInertia::kEulerSpace;
  } else if (gyro == "body") {
    p.gyroscopic = GyroscopicInertia::kBody;
  } else {
    throw ValidationError("params.geometry.gyroscopic must be 'euler' or 'body'");
  }
  p.g = get_or(j, "g", d.g, where);
  p.I_body = {get_or(j, "I_xx", d.I_body(0), where), get_or(j, "I_yy", d.I_body(1), where),
              get_or(j, "I_zz", d.I_body(2), where)};
  p.T_max = get_or(j, "T_max", d.T_max, where);

  const nlohmann::json rotor = j.value("rotor", nlohmann::json::object());
  check_keys(rotor, {"k_t", "k_m", "r"}, "params.rotor");
  p.rotor.k_t = get_or(rotor, "k_t", d.rotor.k_t, "params.rotor");
  p.rotor.k_m = get_or(rotor, "k_m", d.rotor.k_m, "params.rotor");
  p.rotor.r = get_or(rotor, "r", d.rotor.r, "params.rotor");

  observer::ObserverGains& g = cfg.run.gains;
  g.k0 = get_or(j, "k0", g.k0, where);
  g.k1 = get_or(j, "k1", g.k1, where);
  g.k2 = get_or(j, "k2", g.k2, where);
  const nlohmann::json obs = j.value("observer", nlohmann::json::object());
  check_keys(obs, {"mode"}, "params.observer");
  const std::string mode = get_or<std::string>(obs, "mode", "adaptive", "params.observer");
  if (mode == "adaptive") {
    g.mode = observer::GainMode::kAdaptive;
  } else if (mode == "fixed") {
    g.mode = observer::GainMode::kFixed;
  } else {
    throw ValidationError("params.observer.mode must be 'adaptive' or 'fixed'");
  }

  cfg.t_s = get_or(j, "t_s", cfg.t_s, where);
  if (!(cfg.t_s > 0.0)) throw ValidationError("params: t_s must be positive");

  control::AdmittanceParams& adm = cfg.run.admittance;
  if (j.contains("M_a")) adm.M_a = json_mat6(j["M_a"], "params.M_a");
  if (j.contains("B_a")) adm.B_a = json_mat6(j["B_a"], "params.B_a");
  if (j.contains("K_a")) adm.K_a = json_mat6(j["K_a"], "params.K_a");

  const nlohmann::json ctl = j.value("control", nlohmann::json::object());
  check_keys(ctl, {"pos_p", "pos_d", "att_p", "att_d", "max_tilt_deg", "admittance_axes"},
             "params.control");
  control::ControlGains& cg = cfg.run.control;
  cg.pos_p = get_or(ctl, "pos_p", cg.pos_p, "params.control");
  cg.pos_d = get_or(ctl, "pos_d", cg.pos_d, "params.control");
  cg.att_p = get_or(ctl, "att_p", cg.att_p, "params.control");
  cg.att_d = get_or(ctl, "att_d", cg.att_d, "params.control");
  cg.max_tilt = deg2rad(get_or(ctl, "max_tilt_deg", rad2deg(cg.max_tilt), "params.control"));
  if (ctl.contains("admittance_axes")) {
    if (!ctl["admittance_axes"].is_array()) {
      throw ValidationError("params.control.admittance_axes must be an array of axis names");
    }
    adm.active.fill(false);
    for (const auto& a : ctl["admittance_axes"]) {
      if (!a.is_string()) throw ValidationError("params.control.admittance_axes: names only");
      adm.active[scenario::axis_index(a.get<std::string>())] = true;
    }
  }

  const nlohmann::json alloc = j.value("allocation", nlohmann::json::object());
  check_keys(alloc, {"d"}, "params.allocation");
  if (alloc.contains("d")) cfg.run.allocation_weights = json_vec<8>(alloc["d"], "params.allocation.d");

  const nlohmann::json ekf = j.value("ekf", nlohmann::json::object());
  check_keys(ekf, {"Q_eta_dd", "Q_wrench", "R_meas", "wrench_prior_sigma"}, "params.ekf");
  ekf::EkfNoise& en = cfg.run.ekf_noise;
  if (ekf.contains("Q_eta_dd")) en.Q_eta_dd = json_vec<6>(ekf["Q_eta_dd"], "params.ekf.Q_eta_dd");
  if (ekf.contains("Q_wrench")) en.Q_wrench = json_vec<6>(ekf["Q_wrench"], "params.ekf.Q_wrench");
  if (ekf.contains("R_meas")) en.R_meas = json_vec<12>(ekf["R_meas"], "params.ekf.R_meas");
  if (ekf.contains("wrench_prior_sigma")) {
    en.wrench_prior_sigma = json_vec<6>(ekf["wrench_prior_sigma"], "params.ekf.wrench_prior_sigma");
  }

  if (j.contains("envelope")) {
    cfg.has_envelope = true;
    const nlohmann::json& env = j["envelope"];
    check_keys(env, {"phi_max_deg", "theta_max_deg", "rate_max", "attitude_points",
                     "direction_points"},
               "params.envelope");
    stability::Envelope& e = cfg.run.envelope;
    e.phi_max = deg2rad(get_or(env, "phi_max_deg", rad2deg(e.phi_max), "params.envelope"));
    e.theta_max = deg2rad(get_or(env, "theta_max_deg", rad2deg(e.theta_max), "params.envelope"));
    e.rate_max = get_or(env, "rate_max", e.rate_max, "params.envelope");
    e.attitude_points = get_or(env, "attitude_points", e.attitude_points, "params.envelope");
    e.direction_points = get_or(env, "direction_points", e.direction_points, "params.envelope");
  }

  cfg.run.validate();
  return cfg;
}

inline nlohmann::json to_json(const Config& cfg) {
  using namespace detail;
  const SystemParams& p = cfg.run.params;
  const observer::ObserverGains& g = cfg.run.gains;
  const control::AdmittanceParams& adm = cfg.run.admittance;
  const control::ControlGains& cg = cfg.run.control;
  const ekf::EkfNoise& en = cfg.run.ekf_noise;
  const stability::Envelope& e = cfg.run.envelope;
  nlohmann::json axes = nlohmann::json::array();
  for (int i = 0; i < 6; ++i) {
    if (adm.active[i]) axes.push_back(scenario::kAxisNames[i]);
  }
  nlohmann::json j{
      {"m", p.m}, {"L_p", p.L_p}, {"g", p.g}, {"I_xx", p.I_body(0)}, {"I_yy", p.I_body(1)},
      {"I_zz", p.I_body(2)}, {"k0", g.k0}, {"k1", g.k1}, {"k2", g.k2}, {"T_max", p.T_max},
      {"t_s", cfg.t_s}, {"M_a", mat6_json(adm.M_a)}, {"B_a", mat6_json(adm.B_a)},
      {"K_a", mat6_json(adm.K_a)},
      {"rotor", {{"k_t", p.rotor.k_t}, {"k_m", p.rotor.k_m}, {"r", p.rotor.r}}},
      {"geometry",
       {{"m_p", p.m_p}, {"m_q1", p.m_q1}, {"m_q2", p.m_q2}, {"I_quad", vec_json<3>(p.I_quad)},
        {"s1", vec_json<3>(p.s1)}, {"s2", vec_json<3>(p.s2)},
        {"gyroscopic", p.gyroscopic == GyroscopicInertia::kBody ? "body" : "euler"}}},
      {"allocation", {{"d", vec_json<8>(cfg.run.allocation_weights)}}},
      {"observer", {{"mode", g.mode == observer::GainMode::kFixed ? "fixed" : "adaptive"}}},
      {"ekf",
       {{"Q_eta_dd", vec_json<6>(en.Q_eta_dd)}, {"Q_wrench", vec_json<6>(en.Q_wrench)},
        {"R_meas", vec_json<12>(en.R_meas)},
        {"wrench_prior_sigma", vec_json<6>(en.wrench_prior_sigma)}}},
      {"control",
       {{"pos_p", cg.pos_p}, {"pos_d", cg.pos_d}, {"att_p", cg.att_p}, {"att_d", cg.att_d},
        {"max_tilt_deg", rad2deg(cg.max_tilt)}, {"admittance_axes", axes}}}};
  if (cfg.has_envelope) {
    j["envelope"] = {{"phi_max_deg", rad2deg(e.phi_max)},
                     {"theta_max_deg", rad2deg(e.theta_max)},
                     {"rate_max", e.rate_max},
                     {"attitude_points", e.attitude_points},
                     {"direction_points", e.direction_points}};
  }
  return j;
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

inline Config load_config(const std::filesystem::path& path) {
  try {
    return config_from_json(read_json_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError("'" + path.string() + "': " + e.what());
  }
}

// Built-in name or path to a scenario JSON file.
inline scenario::ScenarioSpec resolve_scenario(const std::string& name_or_path) {
  if (auto s = scenario::find_builtin(name_or_path)) return *s;
  const std::filesystem::path path(name_or_path);
  if (!std::filesystem::exists(path)) {
    std::string names;
    for (const auto& s : scenario::builtin_scenarios()) names += (names.empty() ? "" : ", ") + s.name;
    throw IoError("scenario '" + name_or_path + "' is neither a built-in (" + names +
                  ") nor an existing file");
  }
  try {
    return scenario::scenario_from_json(read_json_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError("'" + path.string() + "': " + e.what());
  }
}

}  // namespace agno::config
