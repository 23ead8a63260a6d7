#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "awia/constants.hpp"
#include "awia/errors.hpp"

namespace awia::rydberg {

namespace cn = awia::constants;

struct RydbergState {
  int nu = 0;
  int l = 0;
  double quantum_defect = 0.0;

  double nu_star() const { return nu - quantum_defect; }
  double energy() const {  // J
    double ns = nu_star();
    return -cn::rydberg_energy / (ns * ns);
  }
  double energy_au() const { return energy() / cn::hartree; }

  // outer classical turning point of the Coulomb problem, m
  double r_ct() const {
    double e = energy_au();
    double ll = static_cast<double>(l) * (l + 1);
    double r = (1.0 + std::sqrt(std::max(0.0, 1.0 + 2.0 * e * ll))) / (-2.0 * e);
    return r * cn::bohr_radius;
  }
  // inner classical turning point (0 for l = 0), m
  double r_ct_inner() const {
    if (l == 0) return 0.0;
    double e = energy_au();
    double ll = static_cast<double>(l) * (l + 1);
    double disc = std::max(0.0, 1.0 + 2.0 * e * ll);
    double r = (1.0 - std::sqrt(disc)) / (-2.0 * e);
    return r * cn::bohr_radius;
  }

  void validate() const {
    if (nu < l + 1) throw ConfigError("RydbergState: nu must be >= l+1");
    if (nu_star() <= l) throw ConfigError("RydbergState: nu* must exceed l");
  }
};

struct RadialGridSpec {
  double r_min = 0.0;  // m; 0 selects a default
  double r_max = 0.0;  // m; 0 selects 1.4 * r_ct
  double dr = 0.0;     // m; 0 selects an oscillation-resolving default
};

struct RadialWavefunction {
  std::vector<double> r;  // m, uniform
  std::vector<double> u;  // m^{-1/2}, u = r R(r)
  double norm_check = 0.0;
  int node_count = 0;
  double energy = 0.0;  // J, refined when applicable

  double r0() const { return r.front(); }
  double dr() const { return r.size() > 1 ? r[1] - r[0] : 0.0; }

  // linear interpolation; 0 outside the stored range (u(0) = 0)
  double value(double rq) const {
    if (r.empty() || rq < r.front() || rq > r.back()) return 0.0;
    double x = (rq - r.front()) / dr();
    auto i = static_cast<std::size_t>(x);
    if (i + 1 >= u.size()) return u.back();
    double f = x - static_cast<double>(i);
    return u[i] * (1.0 - f) + u[i + 1] * f;
  }
};

// Local electron wavenumber k(r) from the Coulomb collision energy.
// Returns k in 1/m; past the outer classical turning point the zero-energy
// limit k = 0 is returned and *turned (if given) is set.
inline double electron_momentum(const RydbergState& state, double r,
                                bool* turned = nullptr) {
  if (r <= 0.0) throw ConfigError("electron_momentum: r must be positive");
  double rhs = state.energy() + cn::coulomb_k / r;  // J
  if (turned) *turned = rhs < 0.0;
  if (rhs < 0.0) return 0.0;
  return std::sqrt(2.0 * cn::m_electron * rhs) / cn::hbar;
}

// Kepler-orbit parameters for the classical electron density.
// The angular momentum enters as L = hbar * l; for s states the orbit is a
// degenerate ellipse with eccentricity 1.
inline double kepler_semimajor_axis(const RydbergState& state) {  // m
  return -cn::coulomb_k / (2.0 * state.energy());
}
inline double kepler_eccentricity(const RydbergState& state) {
  double e_au = state.energy_au();
  double ll = static_cast<double>(state.l) * state.l;
  return std::sqrt(std::max(0.0, 1.0 + 2.0 * e_au * ll));
}

// Classical electron probability distribution, literal form
// 1/(8 pi^2 r) / sqrt(eps^2 b^2 - (r-b)^2); zero outside the annulus.
inline double classical_density_raw(const RydbergState& state, double r) {
  double b = kepler_semimajor_axis(state);
  double eps = kepler_eccentricity(state);
  double arg = eps * eps * b * b - (r - b) * (r - b);
  if (arg <= 0.0 || r <= 0.0) return 0.0;
  return 1.0 / (8.0 * cn::pi * cn::pi * r) / std::sqrt(arg);
}

// Unit-normalized classical density: integral of rho_cl 4 pi r^2 dr over the
// annulus is exactly 1 (the literal form integrates to b/2 instead).
inline double classical_density(const RydbergState& state, double r) {
  double b = kepler_semimajor_axis(state);
  return classical_density_raw(state, r) * 2.0 / b;
}

namespace detail {

// Numerov propagation of u'' = g(r) u on a uniform grid (atomic units).
// Advances in place over [i_from, i_to] given two seed values; direction is
// inferred from the index order. Rescales to avoid overflow; the scale
// history is irrelevant because the result is normalized later.
struct NumerovWorkspace {
  std::vector<double> g;  // h^2 g_i / 12 premultiplied
  std::vector<double> u;
};

inline void numerov_sweep(NumerovWorkspace& w, long i_from, long i_to) {
  long step = (i_to > i_from) ? 1 : -1;
  auto& u = w.u;
  auto& t = w.g;
  for (long i = i_from + step; i != i_to; i += step) {
    long ip = i + step, im = i - step;
    double num = (2.0 + 10.0 * t[i]) * u[i] - (1.0 - t[im]) * u[im];
    u[ip] = num / (1.0 - t[ip]);
    if (std::abs(u[ip]) > 1e250) {
      double s = 1e-250;
      for (long j = i_from; ; j += step) {
        u[j] *= s;
        if (j == ip) break;
      }
    }
  }
}

inline int count_nodes(const std::vector<double>& u, double floor_frac = 1e-10) {
  double umax = 0.0;
  for (double v : u) umax = std::max(umax, std::abs(v));
  double floor = umax * floor_frac;
  int nodes = 0;
  double prev = 0.0;
  for (double v : u) {
    if (std::abs(v) < floor) continue;
    if (prev != 0.0 && std::signbit(v) != std::signbit(prev)) ++nodes;
    prev = v;
  }
  return nodes;
}

}  // namespace detail

// Bound radial wavefunction u(r) of the Coulomb problem with quantum-defect
// shifted energy E = -R_Ryd / nu*^2.
//
// defect == 0: two-sided Numerov integration glued at the midpoint of the
// classically allowed region at the analytic eigenenergy (optionally refined
// by log-derivative matching); node count is nu - l - 1.
// defect != 0: inward integration at the fixed quantum-defect energy; the
// core region below the grid is outside the validity of the Coulomb model
// and u is taken as 0 there.
inline RadialWavefunction numerov_radial(const RydbergState& state,
                                         RadialGridSpec spec = {}) {
  state.validate();
  const double a0 = cn::bohr_radius;
  const double e_au = state.energy_au();
  const double ll = static_cast<double>(state.l) * (state.l + 1);
  const double r_out_au = state.r_ct() / a0;
  const double r_in_au = state.r_ct_inner() / a0;

  double r_min = spec.r_min > 0.0
                     ? spec.r_min / a0
                     : std::max({0.02, r_out_au * 2e-4, r_in_au * 0.5});
  // margin past the turning point: 25% plus ~45 asymptotic decay lengths
  double r_max = spec.r_max > 0.0
                     ? spec.r_max / a0
                     : 1.25 * r_out_au + 45.0 / std::sqrt(-2.0 * e_au);
  // default step: >= 24 points per u-oscillation at the inner grid edge
  double k_in = std::sqrt(std::max(2.0 * (e_au + 1.0 / r_min), 1e-12));
  double h = spec.dr > 0.0 ? spec.dr / a0 : std::min(cn::pi / k_in / 24.0, 2.0);
  if (h > cn::pi / k_in / 2.0)
    throw ConfigError("numerov_radial: grid spacing does not resolve the "
                      "wavefunction oscillation at the inner edge");
  if (r_max < 1.2 * r_out_au)
    throw ConfigError("numerov_radial: grid must extend past the outer "
                      "classical turning point");

  auto n_total = static_cast<std::size_t>((r_max - r_min) / h) + 1;
  detail::NumerovWorkspace w;
  w.g.resize(n_total);
  w.u.assign(n_total, 0.0);

  auto fill_g = [&](double energy) {
    for (std::size_t i = 0; i < n_total; ++i) {
      double r = r_min + h * static_cast<double>(i);
      double g = ll / (r * r) - 2.0 / r - 2.0 * energy;
      w.g[i] = h * h * g / 12.0;
    }
  };

  const bool hydrogenic = state.quantum_defect == 0.0;
  double energy = e_au;

  if (hydrogenic) {
    // match at the centre of the allowed region
    double r_match = 0.5 * (std::max(r_in_au, r_min) + r_out_au);
    long m = std::clamp(static_cast<long>((r_match - r_min) / h),
                        long{2}, static_cast<long>(n_total) - 3);
    long n = static_cast<long>(n_total);

    detail::NumerovWorkspace wo, wi;

    // log-derivative mismatch at m; leaves the glued function in w.u
    auto mismatch = [&](double en) {
      fill_g(en);
      wo = w;
      wi = w;
      // seed with the regular Coulomb solution u ~ r^{l+1}(1 - r/(l+1))
      // so the truncated [0, r_min) segment does not shift the energy
      double r0 = r_min, r1 = r_min + h;
      double lp = static_cast<double>(state.l) + 1.0;
      wo.u[0] = 1e-150 * std::exp(lp * std::log(r0 / r1)) * (1.0 - r0 / lp);
      wo.u[1] = 1e-150 * (1.0 - r1 / lp);
      detail::numerov_sweep(wo, 0, m + 1);
      wi.u[n - 1] = 0.0;
      wi.u[n - 2] = 1e-200;
      detail::numerov_sweep(wi, n - 1, m - 1);
      if (wo.u[m] == 0.0 || wi.u[m] == 0.0)
        throw NumericalError("numerov_radial: zero at matching point");
      double scale = wo.u[m] / wi.u[m];
      for (long i = 0; i <= m; ++i) w.u[i] = wo.u[i];
      for (long i = m + 1; i < n; ++i) w.u[i] = wi.u[i] * scale;
      double d_out = (wo.u[m + 1] - wo.u[m - 1]) / (2.0 * h);
      double d_in = (wi.u[m + 1] - wi.u[m - 1]) * scale / (2.0 * h);
      return (d_out - d_in) / wo.u[m];
    };

    // the analytic eigenenergy is shifted O(h^4) by discretization; bracket
    // the signed log-derivative mismatch around it and bisect
    double e0 = e_au;
    double win = std::abs(e0) * 1e-4;
    double lo = e0 - win, hi = e0 + win;
    double f_lo = mismatch(lo), f_hi = mismatch(hi);
    int expand = 0;
    while (std::signbit(f_lo) == std::signbit(f_hi) && expand < 12) {
      win *= 2.0;
      lo = e0 - win;
      hi = e0 + win;
      f_lo = mismatch(lo);
      f_hi = mismatch(hi);
      ++expand;
    }
    if (std::signbit(f_lo) == std::signbit(f_hi))
      throw NumericalError(
          "numerov_radial: inward/outward matching did not converge; trial "
          "energy bracket [" + std::to_string(lo) + ", " +
          std::to_string(hi) + "] Hartree");
    double en = e0;
    for (int it = 0; it < 80; ++it) {
      en = 0.5 * (lo + hi);
      double f = mismatch(en);
      if (!std::isfinite(f)) break;
      if (std::signbit(f) == std::signbit(f_lo))
        lo = en;
      else
        hi = en;
    }
    en = 0.5 * (lo + hi);
    mismatch(en);  // leave the glued function in w.u
    energy = en;
  } else {
    fill_g(e_au);
    w.u[n_total - 1] = 1e-200;
    w.u[n_total - 2] = 1e-200 * std::exp(std::sqrt(std::max(w.g[n_total - 2], 0.0) * 12.0));
    detail::numerov_sweep(w, static_cast<long>(n_total) - 1, 0);
  }

  // bring the raw solution to unit max first (seed scales are ~1e-200 and
  // would underflow when squared)
  double raw_max = 0.0;
  for (double v : w.u) raw_max = std::max(raw_max, std::abs(v));
  if (raw_max == 0.0 || !std::isfinite(raw_max))
    throw NumericalError("numerov_radial: degenerate sweep");
  for (auto& v : w.u) v /= raw_max;

  // normalize: trapezoid on the uniform grid
  double s = 0.0;
  for (std::size_t i = 0; i < n_total; ++i) {
    double wgt = (i == 0 || i + 1 == n_total) ? 0.5 : 1.0;
    s += wgt * w.u[i] * w.u[i];
  }
  s *= h;
  double norm = 1.0 / std::sqrt(s);

  RadialWavefunction out;
  out.r.resize(n_total);
  out.u.resize(n_total);
  double u_scale = norm / std::sqrt(a0);  // a.u. -> m^{-1/2}
  for (std::size_t i = 0; i < n_total; ++i) {
    out.r[i] = (r_min + h * static_cast<double>(i)) * a0;
    out.u[i] = w.u[i] * u_scale;
  }
  // recompute the norm check in SI
  double chk = 0.0;
  for (std::size_t i = 0; i < n_total; ++i) {
    double wgt = (i == 0 || i + 1 == n_total) ? 0.5 : 1.0;
    chk += wgt * out.u[i] * out.u[i];
  }
  out.norm_check = chk * h * a0;
  out.node_count = detail::count_nodes(out.u);
  out.energy = energy * cn::hartree;
  if (!std::isfinite(out.norm_check))
    throw NumericalError("numerov_radial: non-finite wavefunction");
  return out;
}

}  // namespace awia::rydberg
