#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "awia/constants.hpp"
#include "awia/errors.hpp"
#include "awia/rydberg.hpp"
#include "awia/scattering.hpp"

namespace awia::potentials {

namespace cn = awia::constants;
using rydberg::RydbergState;
using rydberg::RadialWavefunction;
using scattering::ScatteringData;

enum class CurveKind { S_WAVE, CASW, SP_WAVE };

inline const char* kind_name(CurveKind k) {
  switch (k) {
    case CurveKind::S_WAVE: return "S_WAVE";
    case CurveKind::CASW: return "CASW";
    case CurveKind::SP_WAVE: return "SP_WAVE";
  }
  return "?";
}

inline CurveKind kind_from_name(const std::string& s) {
  if (s == "S_WAVE") return CurveKind::S_WAVE;
  if (s == "CASW") return CurveKind::CASW;
  if (s == "SP_WAVE") return CurveKind::SP_WAVE;
  throw ConfigError("unknown potential kind: " + s);
}

// Radial impurity potential table. v is stored as V/h in Hz.
struct PotentialCurve {
  CurveKind kind = CurveKind::S_WAVE;
  int nu = 0;
  int l = 0;
  std::vector<double> r;  // m, strictly increasing
  std::vector<double> v;  // Hz
  std::optional<double> cutoff;  // Hz magnitude, if applied
  double r_min_marker = 0.0;  // shape-resonance radius R_min, m
  double r_ct = 0.0;          // outer classical turning point, m

  // linear interpolation; zero beyond the outer end of the table, clamped to
  // the first sample below the inner end (the curve continues into the
  // cutoff-dominated core there, not to zero)
  double value(double rq) const {
    if (r.empty() || rq > r.back()) return 0.0;
    if (rq < r.front()) return v.front();
    auto it = std::lower_bound(r.begin(), r.end(), rq);
    std::size_t i = static_cast<std::size_t>(it - r.begin());
    if (i == 0) return v.front();
    double f = (rq - r[i - 1]) / (r[i] - r[i - 1]);
    return v[i - 1] * (1.0 - f) + v[i] * f;
  }

  double min_value() const {
    double m = 0.0;
    for (double x : v) m = std::min(m, x);
    return m;
  }

  void validate() const {
    if (r.size() != v.size() || r.size() < 2)
      throw ConfigError("PotentialCurve: malformed table");
    for (std::size_t i = 1; i < r.size(); ++i)
      if (!(r[i] > r[i - 1]))
        throw ConfigError("PotentialCurve: r must be strictly increasing");
    if (cutoff && min_value() < -std::abs(*cutoff) * (1.0 + 1e-12))
      throw ConfigError("PotentialCurve: value below declared cutoff");
  }
};

// Radius where the semiclassical electron collision energy equals e_res:
// hbar^2 k^2 / 2m_e = E_nu* + e^2/(4 pi eps0 r) = e_res.
inline double shape_resonance_radius(const RydbergState& state,
                                     double e_res_joule) {
  double denom = e_res_joule - state.energy();
  if (denom <= 0.0)
    throw ConfigError("shape_resonance_radius: energy below the state energy");
  return cn::coulomb_k / denom;
}

// default p-wave shape-resonance energy, e--Rb(5S)
inline constexpr double shape_resonance_energy = 0.02 * cn::ev;  // J

// Fermi-pseudopotential prefactor (2 pi hbar^2 / m_e) a_s, expressed in Hz
// when multiplied by a 3D probability density in 1/m^3.
inline double fermi_prefactor_hz(double a_s_m) {
  return 2.0 * cn::pi * cn::hbar * cn::hbar / cn::m_electron * a_s_m /
         cn::h_planck;
}

// S-wave pseudopotential V(r) = (2 pi hbar^2 / m_e) a_s[k(r)] |psi(r)|^2
// with |psi|^2 = (u/r)^2 / (4 pi), on the wavefunction grid.
inline PotentialCurve s_wave_potential(const RydbergState& state,
                                       const RadialWavefunction& wf,
                                       const ScatteringData& scat) {
  if (std::abs(wf.norm_check - 1.0) > 1e-4)
    throw ConfigError("s_wave_potential: wavefunction is not normalized");
  PotentialCurve c;
  c.kind = CurveKind::S_WAVE;
  c.nu = state.nu;
  c.l = state.l;
  c.r = wf.r;
  c.v.resize(wf.r.size());
  c.r_ct = state.r_ct();
  c.r_min_marker = shape_resonance_radius(state, shape_resonance_energy);
  for (std::size_t i = 0; i < wf.r.size(); ++i) {
    double k = rydberg::electron_momentum(state, wf.r[i]);
    double psi2 = wf.u[i] * wf.u[i] / (wf.r[i] * wf.r[i]) / (4.0 * cn::pi);
    c.v[i] = fermi_prefactor_hz(scat.a_s(k)) * psi2;
  }
  return c;
}

// CASW: the s-wave potential with the quantum density replaced by the
// classical Kepler-orbit density between R_min/2 and R_ct.
inline PotentialCurve casw_potential(const RydbergState& state,
                                     const RadialWavefunction& wf,
                                     const ScatteringData& scat,
                                     double r_min) {
  double r_ct = state.r_ct();
  if (r_min >= r_ct)
    throw ConfigError("casw_potential: R_min must lie below R_ct");
  PotentialCurve c = s_wave_potential(state, wf, scat);
  c.kind = CurveKind::CASW;
  c.r_min_marker = r_min;
  for (std::size_t i = 0; i < c.r.size(); ++i) {
    double r = c.r[i];
    if (r <= 0.5 * r_min || r >= r_ct) continue;
    double k = rydberg::electron_momentum(state, r);
    c.v[i] = fermi_prefactor_hz(scat.a_s(k)) *
             rydberg::classical_density(state, r);
  }
  return c;
}

// v'(r) = max(v(r), -|v_cut|); idempotent, grid and kind preserved.
inline PotentialCurve apply_cutoff(PotentialCurve curve, double v_cut_hz) {
  if (!(v_cut_hz > 0.0))
    throw ConfigError("apply_cutoff: cutoff magnitude must be positive");
  if (std::isinf(v_cut_hz)) return curve;
  double floor = -std::abs(v_cut_hz);
  for (auto& x : curve.v) x = std::max(x, floor);
  if (!curve.cutoff || *curve.cutoff > v_cut_hz) curve.cutoff = v_cut_hz;
  return curve;
}

// ---- curve file format: text header + rows `r_meters v_hertz` ----

inline void save_curve(const PotentialCurve& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write potential curve: " + path);
  out << "# kind " << kind_name(c.kind) << "\n";
  out << "# nu " << c.nu << "\n";
  out << "# l " << c.l << "\n";
  out << "# units r_meters v_hertz\n";
  out.precision(17);
  if (c.cutoff)
    out << "# cutoff " << *c.cutoff << "\n";
  else
    out << "# cutoff none\n";
  out << "# r_min " << c.r_min_marker << "\n";
  out << "# r_ct " << c.r_ct << "\n";
  for (std::size_t i = 0; i < c.r.size(); ++i)
    out << c.r[i] << " " << c.v[i] << "\n";
  if (!out) throw IoError("write failed: " + path);
}

inline PotentialCurve load_curve(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open potential curve: " + path);
  PotentialCurve c;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') {
      std::istringstream h(line.substr(1));
      std::string key;
      h >> key;
      if (key == "kind") {
        std::string v;
        h >> v;
        c.kind = kind_from_name(v);
      } else if (key == "nu") {
        h >> c.nu;
      } else if (key == "l") {
        h >> c.l;
      } else if (key == "cutoff") {
        std::string v;
        h >> v;
        if (v != "none") c.cutoff = std::stod(v);
      } else if (key == "r_min") {
        h >> c.r_min_marker;
      } else if (key == "r_ct") {
        h >> c.r_ct;
      }
      continue;
    }
    std::istringstream row(line);
    double r, v;
    if (!(row >> r)) continue;
    if (!(row >> v))
      throw ConfigError(path + ": expected rows `r_meters v_hertz`");
    c.r.push_back(r);
    c.v.push_back(v);
  }
  c.validate();
  return c;
}

}  // namespace awia::potentials
