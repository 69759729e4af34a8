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

// Scripted interaction wrenches, model disturbances and run settings.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agno/ekf.hpp"
#include "agno/types.hpp"

namespace agno::scenario {

inline const std::array<std::string, 6> kAxisNames{"fx", "fy", "fz", "mx", "my", "mz"};

inline int axis_index(const std::string& name) {
  for (int i = 0; i < 6; ++i) {
    if (kAxisNames[i] == name) return i;
  }
  throw ValidationError("unknown wrench axis '" + name + "' (expected fx, fy, fz, mx, my, mz)");
}

// step: constant `amplitude` switched on at t_start.
// hold: constant `amplitude`, used to continue a plateau.
// ramp: linear from `from` at t_start to `amplitude` at t_end.
// sine: amplitude * sin(2 pi frequency (t - t_start) + phase).
enum class Shape { kStep, kRamp, kSine, kHold };

inline std::string shape_name(Shape s) {
  switch (s) {
    case Shape::kStep: return "step";
    case Shape::kRamp: return "ramp";
    case Shape::kSine: return "sine";
    case Shape::kHold: return "hold";
  }
  return "step";
}

inline Shape parse_shape(const std::string& s) {
  if (s == "step") return Shape::kStep;
  if (s == "ramp") return Shape::kRamp;
  if (s == "sine") return Shape::kSine;
  if (s == "hold") return Shape::kHold;
  throw ValidationError("unknown segment shape '" + s + "' (expected step|ramp|sine|hold)");
}

// Active on [t_start, t_end).
struct Segment {
  double t_start = 0.0;
  double t_end = 0.0;
  Shape shape = Shape::kStep;
  std::array<bool, 6> axes{};
  double amplitude = 0.0;
  double from = 0.0;
  double frequency = 0.0;  // Hz
  double phase = 0.0;      // rad

  bool active(double t) const { return t >= t_start && t < t_end; }

  double value(double t) const {
    switch (shape) {
      case Shape::kStep:
      case Shape::kHold:
        return amplitude;
      case Shape::kRamp:
        return from + (amplitude - from) * (t - t_start) / (t_end - t_start);
      case Shape::kSine:
        return amplitude * std::sin(2.0 * kPi * frequency * (t - t_start) + phase);
    }
    return 0.0;
  }

  double peak() const {
    return shape == Shape::kRamp ? std::max(std::abs(from), std::abs(amplitude))
                                 : std::abs(amplitude);
  }
};

// Slowly varying model disturbance, Delta_i(t) = bias_i + amplitude_i sin(2 pi f_i t + phase_i).
struct Disturbance {
  double epsilon = 0.0;
  Vec6 bias = Vec6::Zero();
  Vec6 amplitude = Vec6::Zero();
  Vec6 frequency = Vec6::Zero();
  Vec6 phase = Vec6::Zero();

  Vec6 at(double t) const {
    Vec6 d;
    for (int i = 0; i < 6; ++i) {
      d(i) = bias(i) + amplitude(i) * std::sin(2.0 * kPi * frequency(i) * t + phase(i));
    }
    return d;
  }

  double sup_norm_bound() const { return (bias.cwiseAbs() + amplitude.cwiseAbs()).maxCoeff(); }

  void validate() const {
    if (!(epsilon >= 0.0) || !bias.allFinite() || !amplitude.allFinite() ||
        !frequency.allFinite() || !phase.allFinite()) {
      throw ValidationError("disturbance parameters must be finite with epsilon >= 0");
    }
    if (sup_norm_bound() > epsilon + 1e-12) {
      throw ValidationError("disturbance exceeds its bound: |bias| + |amplitude| = " +
                            std::to_string(sup_norm_bound()) + " > epsilon = " +
                            std::to_string(epsilon));
    }
  }
};

struct ScenarioSpec {
  std::string name = "unnamed";
  double duration = 70.0;
  double dt_physics = 1e-3;
  double dt_control = 0.01;
  std::vector<Segment> segments;
  ekf::SensorNoise noise{};
  std::optional<Disturbance> disturbance;
  std::uint64_t seed = 42;
  Vec6 hover = (Vec6() << 0.0, 0.0, 1.0, 0.0, 0.0, 0.0).finished();
  Vec6 initial_offset = Vec6::Zero();

  int substeps() const { return static_cast<int>(std::lround(dt_control / dt_physics)); }
  long ticks() const { return std::lround(duration / dt_control); }

  // Scripted wrench at time t.
  Wrench wrench_at(double t) const { return wrench_at(t, t); }

  // Segments are selected at `t_select` and evaluated at `t`; the simulator
  // selects at the middle of each physics step so that switching instants on
  // the step grid are resolved exactly.
  Wrench wrench_at(double t, double t_select) const {
    Vec6 w = Vec6::Zero();
    for (const Segment& seg : segments) {
      if (!seg.active(t_select)) continue;
      const double v = seg.value(t);
      for (int i = 0; i < 6; ++i) {
        if (seg.axes[i]) w(i) += v;
      }
    }
    return Wrench::from(w);
  }

  Vec6 disturbance_at(double t) const {
    return disturbance ? disturbance->at(t) : Vec6::Zero();
  }

  void validate() const {
    if (!(duration > 0.0) || !std::isfinite(duration)) {
      throw ValidationError("scenario '" + name + "': duration must be positive");
    }
    if (!(dt_physics > 0.0) || !(dt_control > 0.0)) {
      throw ValidationError("scenario '" + name + "': time steps must be positive");
    }
    const double ratio = dt_control / dt_physics;
    if (ratio < 1.0 - 1e-9 || std::abs(ratio - std::round(ratio)) > 1e-6 * ratio) {
      throw ValidationError("scenario '" + name +
                            "': dt_control must be an integer multiple of dt_physics");
    }
    const double n = duration / dt_control;
    if (std::abs(n - std::round(n)) > 1e-6 * std::max(1.0, n)) {
      throw ValidationError("scenario '" + name +
                            "': duration must be an integer multiple of dt_control");
    }
    for (const Segment& s : segments) {
      if (!(s.t_end > s.t_start) || !std::isfinite(s.t_start + s.t_end + s.amplitude + s.from +
                                                   s.frequency + s.phase)) {
        throw ValidationError("scenario '" + name + "': segment needs finite t_end > t_start");
      }
      if (std::none_of(s.axes.begin(), s.axes.end(), [](bool b) { return b; })) {
        throw ValidationError("scenario '" + name + "': segment has an empty axis mask");
      }
    }
    for (int axis = 0; axis < 6; ++axis) {
      std::vector<std::pair<double, double>> spans;
      for (const Segment& s : segments) {
        if (s.axes[axis]) spans.emplace_back(s.t_start, s.t_end);
      }
      std::sort(spans.begin(), spans.end());
      for (std::size_t i = 1; i < spans.size(); ++i) {
        if (spans[i].first < spans[i - 1].second) {
          throw ValidationError("scenario '" + name + "': overlapping segments on axis " +
                                kAxisNames[axis]);
        }
      }
    }
    const ekf::Vec12 sig = noise.sigmas();
    if ((sig.array() < 0.0).any() || !sig.allFinite()) {
      throw ValidationError("scenario '" + name + "': noise sigmas must be non-negative");
    }
    if (disturbance) disturbance->validate();
    if (!hover.allFinite() || !initial_offset.allFinite()) {
      throw ValidationError("scenario '" + name + "': hover and initial_offset must be finite");
    }
  }
};

inline Segment make_segment(double t0, double t1, Shape shape,
                            std::initializer_list<const char*> axes, double amplitude,
                            double frequency = 0.0, double from = 0.0, double phase = 0.0) {
  Segment s;
  s.t_start = t0;
  s.t_end = t1;
  s.shape = shape;
  for (const char* a : axes) s.axes[axis_index(a)] = true;
  s.amplitude = amplitude;
  s.frequency = frequency;
  s.from = from;
  s.phase = phase;
  return s;
}

namespace detail {

inline ScenarioSpec base(const std::string& name, double duration = 70.0) {
  ScenarioSpec s;
  s.name = name;
  s.duration = duration;
  return s;
}

}  // namespace detail

// The wrench is already applied when the run starts, so the estimators begin
// with a large error.
inline ScenarioSpec init_transient() {
  using enum Shape;
  ScenarioSpec s = detail::base("init-transient");
  s.segments = {
      make_segment(0, 20, kHold, {"fx"}, 2.5),
      make_segment(0, 20, kHold, {"fy"}, -1.5),
      make_segment(0, 20, kHold, {"fz"}, 1.0),
      make_segment(0, 20, kHold, {"mz"}, 0.3),
      make_segment(20, 28, kRamp, {"fx"}, 0.0, 0.0, 2.5),
      make_segment(20, 28, kRamp, {"fy"}, 0.0, 0.0, -1.5),
      make_segment(20, 28, kRamp, {"fz"}, 0.0, 0.0, 1.0),
      make_segment(20, 28, kRamp, {"mz"}, 0.0, 0.0, 0.3),
      make_segment(30, 70, kSine, {"fx"}, 1.5, 0.05),
      make_segment(30, 70, kSine, {"fy"}, 1.0, 0.025),
      make_segment(30, 70, kSine, {"mz"}, 0.2, 0.05),
  };
  return s;
}

inline ScenarioSpec direction_reversal() {
  using enum Shape;
  ScenarioSpec s = detail::base("direction-reversal");
  s.segments = {
      make_segment(0, 4, kRamp, {"fx"}, 2.0),
      make_segment(4, 8, kHold, {"fx"}, 2.0),
      make_segment(8, 12, kRamp, {"fx"}, -2.0, 0.0, 2.0),
      make_segment(12, 30, kHold, {"fx"}, -2.0),
      make_segment(30, 34, kRamp, {"fx"}, 2.0, 0.0, -2.0),
      make_segment(34, 50, kHold, {"fx"}, 2.0),
      make_segment(50, 54, kRamp, {"fx"}, 0.0, 0.0, 2.0),
      make_segment(0, 70, kSine, {"fz"}, 0.8, 1.0 / 35.0),
      make_segment(20, 60, kSine, {"mz"}, 0.2, 0.05),
  };
  return s;
}

inline ScenarioSpec bidirectional() {
  using enum Shape;
  ScenarioSpec s = detail::base("bidirectional");
  s.segments = {
      make_segment(0, 32, kSine, {"fy"}, 1.5, 1.0 / 32.0),
      make_segment(32, 36, kSine, {"fy"}, 2.0, 0.5),
      make_segment(36, 70, kSine, {"fy"}, 1.0, 1.0 / 34.0),
      make_segment(0, 70, kSine, {"fx"}, 1.0, 1.0 / 35.0),
      make_segment(10, 60, kSine, {"mz"}, 0.2, 0.04),
  };
  return s;
}

// Simultaneous f_x oscillation and yaw-torque ramp in the 43-56 s window.
inline ScenarioSpec coupled_force_torque() {
  using enum Shape;
  ScenarioSpec s = detail::base("coupled-force-torque");
  s.segments = {
      make_segment(0, 43, kSine, {"fx"}, 2.0, 2.0 / 43.0),
      make_segment(43, 56, kSine, {"fx"}, 4.0, 4.0 / 13.0),
      make_segment(56, 70, kSine, {"fx"}, 1.0, 1.0 / 14.0),
      make_segment(0, 70, kSine, {"fy"}, 1.5, 1.0 / 35.0),
      make_segment(0, 70, kSine, {"fz"}, 1.0, 1.0 / 20.0),
      make_segment(10, 30, kSine, {"mz"}, 0.2, 0.05),
      make_segment(43, 56, kRamp, {"mz"}, 0.6),
      make_segment(56, 60, kRamp, {"mz"}, 0.0, 0.0, 0.6),
  };
  return s;
}

// Slow, small wrenches; the EKF noise densities are tuned on this run.
inline ScenarioSpec smooth_motion() {
  using enum Shape;
  ScenarioSpec s = detail::base("smooth-motion");
  s.segments = {
      make_segment(0, 70, kSine, {"fx"}, 1.0, 1.0 / 70.0),
      make_segment(0, 70, kSine, {"fy"}, 0.8, 1.0 / 35.0),
      make_segment(0, 70, kSine, {"fz"}, 0.6, 1.0 / 35.0, 0.0, kPi / 2.0),
      make_segment(0, 70, kSine, {"mz"}, 0.1, 1.0 / 70.0),
  };
  return s;
}

inline ScenarioSpec disturbance_robustness() {
  using enum Shape;
  ScenarioSpec s = detail::base("disturbance-robustness");
  s.segments = {
      make_segment(0, 70, kSine, {"fx"}, 2.0, 0.1),
      make_segment(0, 70, kSine, {"fy"}, 1.5, 0.07),
      make_segment(0, 70, kSine, {"mz"}, 0.2, 0.05),
  };
  Disturbance d;
  d.epsilon = 0.5;
  d.bias << 0.2, -0.2, 0.1, 0.05, -0.05, 0.05;
  d.amplitude << 0.25, 0.25, 0.25, 0.05, 0.05, 0.1;
  d.frequency = Vec6::Constant(0.02);
  d.phase << 0.0, 1.0, 2.0, 0.5, 1.5, 2.5;
  s.disturbance = d;
  return s;
}

// Simultaneous steps on every channel at t = 1 s.
inline ScenarioSpec step_wrench() {
  using enum Shape;
  ScenarioSpec s = detail::base("step-wrench", 20.0);
  s.segments = {
      make_segment(1, 20, kStep, {"fx"}, 2.0),
      make_segment(1, 20, kStep, {"fy"}, -1.5),
      make_segment(1, 20, kStep, {"fz"}, 3.0),
      make_segment(1, 20, kStep, {"mz"}, 0.3),
  };
  return s;
}

inline ScenarioSpec hover(double duration = 10.0) { return detail::base("hover", duration); }

// The six interaction scenarios of the benchmark.
inline std::vector<ScenarioSpec> reference_scenarios() {
  return {init_transient(), direction_reversal(), bidirectional(),
          coupled_force_torque(), smooth_motion(), disturbance_robustness()};
}

// Everything addressable by name from the command line.
inline std::vector<ScenarioSpec> builtin_scenarios() {
  std::vector<ScenarioSpec> all = reference_scenarios();
  all.push_back(step_wrench());
  all.push_back(hover());
  return all;
}

inline std::optional<ScenarioSpec> find_builtin(const std::string& name) {
  for (ScenarioSpec& s : builtin_scenarios()) {
    if (s.name == name) return s;
  }
  return std::nullopt;
}

// Copy with sensor noise and model disturbance removed.
inline ScenarioSpec noiseless(ScenarioSpec s) {
  s.noise = s.noise.scaled(0.0);
  s.disturbance.reset();
  return s;
}

// ---- JSON -------------------------------------------------------------------

namespace detail {

template <int N>
nlohmann::json vec_json(const Eigen::Matrix<double, N, 1>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < N; ++i) a.push_back(v(i));
  return a;
}

template <int N>
Eigen::Matrix<double, N, 1> json_vec(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(N)) {
    throw ValidationError(what + ": expected an array of " + std::to_string(N) + " numbers");
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) {
    if (!j[i].is_number()) throw ValidationError(what + ": entries must be numbers");
    v(i) = j[i].get<double>();
  }
  return v;
}

inline void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                       const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* k) { return it.key() == k; })) {
      throw ValidationError(where + ": unknown key '" + it.key() + "'");
    }
  }
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(where + ": key '" + key + "' has the wrong type");
  }
}

}  // namespace detail

inline nlohmann::json to_json(const Segment& s) {
  nlohmann::json axes = nlohmann::json::array();
  for (int i = 0; i < 6; ++i) {
    if (s.axes[i]) axes.push_back(kAxisNames[i]);
  }
  nlohmann::json j{{"t_start", s.t_start}, {"t_end", s.t_end}, {"shape", shape_name(s.shape)},
                   {"axes", axes}, {"amplitude", s.amplitude}};
  if (s.shape == Shape::kRamp) j["from"] = s.from;
  if (s.shape == Shape::kSine) {
    j["frequency"] = s.frequency;
    j["phase"] = s.phase;
  }
  return j;
}

inline Segment segment_from_json(const nlohmann::json& j) {
  const std::string where = "segment";
  detail::check_keys(j, {"t_start", "t_end", "shape", "axes", "amplitude", "from", "frequency",
                         "phase"},
                     where);
  for (const char* req : {"t_start", "t_end", "shape", "axes", "amplitude"}) {
    if (!j.contains(req)) throw ValidationError(where + ": missing key '" + req + "'");
  }
  Segment s;
  s.t_start = detail::get_or(j, "t_start", 0.0, where);
  s.t_end = detail::get_or(j, "t_end", 0.0, where);
  s.shape = parse_shape(detail::get_or<std::string>(j, "shape", "step", where));
  s.amplitude = detail::get_or(j, "amplitude", 0.0, where);
  s.from = detail::get_or(j, "from", 0.0, where);
  s.frequency = detail::get_or(j, "frequency", 0.0, where);
  s.phase = detail::get_or(j, "phase", 0.0, where);
  if (!j["axes"].is_array()) throw ValidationError(where + ": 'axes' must be an array");
  for (const auto& a : j["axes"]) {
    if (!a.is_string()) throw ValidationError(where + ": axis names must be strings");
    s.axes[axis_index(a.get<std::string>())] = true;
  }
  return s;
}

inline nlohmann::json to_json(const ekf::SensorNoise& n) {
  return {{"sigma_pos_m", n.sigma_pos},
          {"sigma_att_deg", rad2deg(n.sigma_att)},
          {"sigma_vel_mps", n.sigma_vel},
          {"sigma_rate_dps", rad2deg(n.sigma_rate)}};
}

inline ekf::SensorNoise noise_from_json(const nlohmann::json& j) {
  const std::string where = "noise";
  detail::check_keys(j, {"sigma_pos_m", "sigma_att_deg", "sigma_vel_mps", "sigma_rate_dps",
                         "scale"},
                     where);
  const ekf::SensorNoise d{};
  ekf::SensorNoise n;
  n.sigma_pos = detail::get_or(j, "sigma_pos_m", d.sigma_pos, where);
  n.sigma_att = deg2rad(detail::get_or(j, "sigma_att_deg", rad2deg(d.sigma_att), where));
  n.sigma_vel = detail::get_or(j, "sigma_vel_mps", d.sigma_vel, where);
  n.sigma_rate = deg2rad(detail::get_or(j, "sigma_rate_dps", rad2deg(d.sigma_rate), where));
  return n.scaled(detail::get_or(j, "scale", 1.0, where));
}

inline nlohmann::json to_json(const Disturbance& d) {
  return {{"epsilon", d.epsilon},
          {"bias", detail::vec_json<6>(d.bias)},
          {"amplitude", detail::vec_json<6>(d.amplitude)},
          {"frequency", detail::vec_json<6>(d.frequency)},
          {"phase", detail::vec_json<6>(d.phase)}};
}

inline Disturbance disturbance_from_json(const nlohmann::json& j) {
  const std::string where = "disturbance";
  detail::check_keys(j, {"epsilon", "bias", "amplitude", "frequency", "phase"}, where);
  if (!j.contains("epsilon")) throw ValidationError(where + ": missing key 'epsilon'");
  Disturbance d;
  d.epsilon = detail::get_or(j, "epsilon", 0.0, where);
  if (j.contains("bias")) d.bias = detail::json_vec<6>(j["bias"], where + ".bias");
  if (j.contains("amplitude")) {
    d.amplitude = detail::json_vec<6>(j["amplitude"], where + ".amplitude");
  }
  if (j.contains("frequency")) {
    d.frequency = detail::json_vec<6>(j["frequency"], where + ".frequency");
  }
  if (j.contains("phase")) d.phase = detail::json_vec<6>(j["phase"], where + ".phase");
  return d;
}

inline nlohmann::json to_json(const ScenarioSpec& s) {
  nlohmann::json segs = nlohmann::json::array();
  for (const Segment& seg : s.segments) segs.push_back(to_json(seg));
  nlohmann::json j{{"name", s.name},
                   {"duration", s.duration},
                   {"dt_physics", s.dt_physics},
                   {"dt_control", s.dt_control},
                   {"seed", s.seed},
                   {"hover", detail::vec_json<6>(s.hover)},
                   {"initial_offset", detail::vec_json<6>(s.initial_offset)},
                   {"noise", to_json(s.noise)},
                   {"segments", segs}};
  if (s.disturbance) j["disturbance"] = to_json(*s.disturbance);
  return j;
}

inline ScenarioSpec scenario_from_json(const nlohmann::json& j) {
  const std::string where = "scenario";
  detail::check_keys(j, {"name", "duration", "dt_physics", "dt_control", "seed", "hover",
                         "initial_offset", "noise", "segments", "disturbance"},
                     where);
  ScenarioSpec s;
  s.name = detail::get_or<std::string>(j, "name", "custom", where);
  s.duration = detail::get_or(j, "duration", s.duration, where);
  s.dt_physics = detail::get_or(j, "dt_physics", s.dt_physics, where);
  s.dt_control = detail::get_or(j, "dt_control", s.dt_control, where);
  s.seed = detail::get_or<std::uint64_t>(j, "seed", s.seed, where);
  if (j.contains("hover")) s.hover = detail::json_vec<6>(j["hover"], where + ".hover");
  if (j.contains("initial_offset")) {
    s.initial_offset = detail::json_vec<6>(j["initial_offset"], where + ".initial_offset");
  }
  if (j.contains("noise")) s.noise = noise_from_json(j["noise"]);
  if (j.contains("segments")) {
    if (!j["segments"].is_array()) throw ValidationError(where + ": 'segments' must be an array");
    for (const auto& seg : j["segments"]) s.segments.push_back(segment_from_json(seg));
  }
  if (j.contains("disturbance") && !j["disturbance"].is_null()) {
    s.disturbance = disturbance_from_json(j["disturbance"]);
  }
  s.validate();
  return s;
}

}  // namespace agno::scenario
