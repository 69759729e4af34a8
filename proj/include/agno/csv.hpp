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

// Run log CSV with a fixed column order and 9 significant digits.

#pragma once

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "agno/sim.hpp"

namespace agno::csv {

inline std::vector<std::string> header(bool has_agno, bool has_ekf) {
  std::vector<std::string> h{"t", "x", "y", "z", "phi", "theta", "psi",
                             "vx", "vy", "vz", "dphi", "dtheta", "dpsi"};
  static const char* kCh[6] = {"fx", "fy", "fz", "mx", "my", "mz"};
  for (const char* c : kCh) h.push_back(std::string("true_") + c);
  if (has_agno) {
    for (const char* c : kCh) h.push_back(std::string("agno_") + c);
  }
  if (has_ekf) {
    for (const char* c : kCh) h.push_back(std::string("ekf_") + c);
  }
  for (const char* c : {"uq_T1", "uq_t11", "uq_t12", "uq_t13", "uq_T2", "uq_t21", "uq_t22",
                        "uq_t23"}) {
    h.emplace_back(c);
  }
  if (has_agno) {
    h.emplace_back("V_e");
    h.emplace_back("k_eff");
  }
  h.emplace_back("sat_flags");
  return h;
}

namespace detail {

inline void put(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  line += ',';
  line += buf;
}

template <int N>
void put(std::string& line, const Eigen::Matrix<double, N, 1>& v) {
  for (int i = 0; i < N; ++i) put(line, v(i));
}

}  // namespace detail

inline void write(const sim::RunLog& log, std::ostream& os) {
  const std::vector<std::string> h = header(log.has_agno, log.has_ekf);
  for (std::size_t i = 0; i < h.size(); ++i) os << (i ? "," : "") << h[i];
  os << '\n';
  for (const sim::RunRow& r : log.rows) {
    std::string line;
    detail::put(line, r.t);
    detail::put(line, r.eta);
    detail::put(line, r.eta_dot);
    detail::put(line, r.wrench_true);
    if (log.has_agno) detail::put(line, r.wrench_agno);
    if (log.has_ekf) detail::put(line, r.wrench_ekf);
    detail::put(line, r.u_q);
    if (log.has_agno) {
      detail::put(line, r.V_e);
      detail::put(line, r.k_eff);
    }
    line += ',' + std::to_string(r.sat_flags);
    os << line.substr(1) << '\n';
  }
  if (!os) throw IoError("failed to write CSV log");
}

inline std::string to_string(const sim::RunLog& log) {
  std::ostringstream os;
  write(log, os);
  return os.str();
}

// Parses a CSV produced by write(). Only the per-row data round-trips; the
// stability report and warnings are not part of the file.
inline sim::RunLog parse(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("CSV log is empty");
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  sim::RunLog log;
  log.has_agno = false;
  log.has_ekf = false;
  for (const std::string& c : cols) {
    if (c == "agno_fx") log.has_agno = true;
    if (c == "ekf_fx") log.has_ekf = true;
  }
  if (cols != header(log.has_agno, log.has_ekf)) {
    throw ValidationError("CSV header does not match the run log layout");
  }

  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> v;
    v.reserve(cols.size());
    const char* p = line.c_str();
    while (true) {
      char* end = nullptr;
      const double x = std::strtod(p, &end);
      if (end == p) throw ValidationError("CSV line " + std::to_string(lineno) + ": bad number");
      v.push_back(x);
      if (*end == '\0') break;
      if (*end != ',') throw ValidationError("CSV line " + std::to_string(lineno) + ": bad separator");
      p = end + 1;
    }
    if (v.size() != cols.size()) {
      throw ValidationError("CSV line " + std::to_string(lineno) + ": expected " +
                            std::to_string(cols.size()) + " fields, got " +
                            std::to_string(v.size()));
    }
    std::size_t i = 0;
    auto take = [&](auto& vec) {
      for (int j = 0; j < vec.size(); ++j) vec(j) = v[i++];
    };
    sim::RunRow r;
    r.t = v[i++];
    take(r.eta);
    take(r.eta_dot);
    take(r.wrench_true);
    if (log.has_agno) take(r.wrench_agno);
    if (log.has_ekf) take(r.wrench_ekf);
    take(r.u_q);
    if (log.has_agno) {
      r.V_e = v[i++];
      r.k_eff = v[i++];
    }
    r.sat_flags = static_cast<int>(v[i++]);
    log.rows.push_back(r);
  }
  if (log.rows.size() >= 2) log.dt_control = log.rows[1].t - log.rows[0].t;
  return log;
}

inline sim::RunLog parse_string(const std::string& text) {
  std::istringstream is(text);
  return parse(is);
}

}  // namespace agno::csv
