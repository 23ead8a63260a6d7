#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "awia/constants.hpp"
#include "awia/errors.hpp"

namespace awia::scattering {

namespace cn = awia::constants;

// Sampled electron-atom phase shift delta(k), one partial wave per table.
// k is stored in atomic units (1/a0), delta in radians.
struct PhaseTable {
  std::vector<double> k;
  std::vector<double> delta;

  bool empty() const { return k.empty(); }

  void validate() const {
    if (k.size() != delta.size())
      throw ConfigError("PhaseTable: column length mismatch");
    for (std::size_t i = 1; i < k.size(); ++i)
      if (!(k[i] > k[i - 1]))
        throw ConfigError("PhaseTable: k must be strictly increasing");
    if (!k.empty() && k.front() <= 0.0)
      throw ConfigError("PhaseTable: k must be positive");
  }

  // linear interpolation of delta; k below the first sample clamps to the
  // first entry (the tables are expected to start at near-zero k), k above
  // the last sample is refused rather than extrapolated
  double interp(double k_au, const char* channel) const {
    if (k_au <= k.front()) return delta.front();
    if (k_au > k.back())
      throw ConfigError(std::string("phase table (") + channel +
                        "): k = " + std::to_string(k_au) +
                        " a.u. beyond tabulated range [" +
                        std::to_string(k.front()) + ", " +
                        std::to_string(k.back()) +
                        "]; extrapolation refused");
    auto it = std::lower_bound(k.begin(), k.end(), k_au);
    std::size_t i = static_cast<std::size_t>(it - k.begin());
    double f = (k_au - k[i - 1]) / (k[i] - k[i - 1]);
    return delta[i - 1] * (1.0 - f) + delta[i] * f;
  }
};

// Loads a two-column text table: `#` comments, rows `k_atomic_units
// delta_radians`.
inline PhaseTable load_phase_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open phase-shift table: " + path);
  PhaseTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double k, d;
    if (!(row >> k)) continue;  // blank / comment-only line
    if (!(row >> d))
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected `k_atomic_units delta_radians`");
    t.k.push_back(k);
    t.delta.push_back(d);
  }
  t.validate();
  if (t.empty()) throw ConfigError("phase-shift table is empty: " + path);
  return t;
}

// Electron-atom scattering input for the potential curves: the zero-energy
// s-wave length plus optional sampled phase shifts for the s and p channels.
// Without tables the s-wave length is held constant at a_s0 and the p-wave
// coupling is zero.
struct ScatteringData {
  double a_s0 = cn::a_s_zero;  // m
  PhaseTable s_table;
  PhaseTable p_table;
  std::string source_id = "constant-a_s fallback";

  static ScatteringData constant(double a_s0_m = cn::a_s_zero) {
    ScatteringData d;
    d.a_s0 = a_s0_m;
    return d;
  }

  static ScatteringData from_files(const std::string& s_path,
                                   const std::string& p_path,
                                   double a_s0_m = cn::a_s_zero) {
    ScatteringData d;
    d.a_s0 = a_s0_m;
    if (!s_path.empty()) d.s_table = load_phase_table(s_path);
    if (!p_path.empty()) d.p_table = load_phase_table(p_path);
    d.source_id = "tables: s=" + s_path + " p=" + p_path;
    d.validate();
    return d;
  }

  bool has_s_table() const { return !s_table.empty(); }
  bool has_p_table() const { return !p_table.empty(); }

  void validate() const {
    s_table.validate();
    p_table.validate();
    if (has_s_table()) {
      // the low-k limit of -tan(delta_s)/k must reproduce a_s0
      double k0 = s_table.k.front();
      double lim = -std::tan(s_table.delta.front()) / k0 * cn::bohr_radius;
      if (std::abs(lim - a_s0) > 0.05 * std::abs(a_s0))
        throw ConfigError(
            "s-wave table low-k limit " + std::to_string(lim / cn::bohr_radius) +
            " a0 inconsistent with a_s0 = " +
            std::to_string(a_s0 / cn::bohr_radius) + " a0 (>5%)");
    }
  }

  // energy-dependent s-wave scattering length a_s[k] = -tan(delta_s)/k, in m;
  // k in 1/m. k = 0 (at and past the turning point) maps to a_s0.
  double a_s(double k_si) const {
    if (k_si <= 0.0 || !has_s_table()) return a_s0;
    double k_au = k_si * cn::bohr_radius;
    if (k_au <= s_table.k.front()) {
      // blend to the declared zero-energy value below the first sample
      double f = k_au / s_table.k.front();
      double at_first =
          -std::tan(s_table.delta.front()) / s_table.k.front() * cn::bohr_radius;
      return a_s0 * (1.0 - f) + at_first * f;
    }
    double d = s_table.interp(k_au, "s");
    return -std::tan(d) / k_au * cn::bohr_radius;
  }

  // p-wave scattering volume a_p[k]^3 = -tan(delta_p)/k^3, in m^3
  double a_p_cubed(double k_si) const {
    if (k_si <= 0.0 || !has_p_table()) return 0.0;
    double k_au = std::max(k_si * cn::bohr_radius, p_table.k.front());
    double d = p_table.interp(k_au, "p");
    double v_au = -std::tan(d) / (k_au * k_au * k_au);
    return v_au * cn::bohr_radius * cn::bohr_radius * cn::bohr_radius;
  }
};

}  // namespace awia::scattering
