#pragma once

// Born-Oppenheimer energy surface of a Rydberg electron perturbed by a single
// ground-state atom at distance R, with s-wave (contact) and p-wave
// (gradient-contact) electron-atom interactions.  In the sigma (m = 0) block
// the perturbation is a rank-2 update of the unperturbed Hamiltonian,
//
//   H = diag(E_i) + c_a a a^T + c_b b b^T,
//   a_i = sqrt((2l_i+1)/4pi) u_i(R)/R,
//   b_i = sqrt((2l_i+1)/4pi) d/dR [u_i(R)/R],
//   c_a = 2 pi a_s[k(R)],   c_b = 6 pi a_p[k(R)]^3        (atomic units)
//
// so its eigenvalues are roots of the 2x2 secular determinant
//   det( I + C G(lambda) ) = 0,   G_ab = sum_i w_ai w_bi / (E_i - lambda).
// The returned curve is the branch connected to the target state: the lowest
// root between the target level and the nearest unperturbed level below it
// (or, where the p-wave channel is repulsive and no root lies below, the
// lowest root between the target level and the nearest level above).  At
// large R this is the weakly shifted target state; near the p-wave shape
// resonance it dives towards the interval bottom (the deep central well).
//
// The default basis is the quantum-defect s/p/d series around the target.
// A contact potential diagonalized over the near-degenerate high-l manifolds
// picks up a second-order dressing of the target branch that grows without
// bound as the basis is enlarged (the delta interaction has no convergent
// perturbation series beyond first order), so the high-l manifolds are
// opt-in via l_max for studying the deep trilobite/butterfly branches, not
// part of the returned target branch by default.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "awia/constants.hpp"
#include "awia/errors.hpp"
#include "awia/potentials.hpp"
#include "awia/rydberg.hpp"
#include "awia/scattering.hpp"

namespace awia::potentials {

struct SpBasisSpec {
  int manifolds_below = 5;  // level-window half-widths around the target
  int manifolds_above = 1;
  int l_max = 2;  // cap on hydrogenic l; -1 keeps full manifolds, the
                  // default excludes them (see the header comment)
  // Rb quantum defects for the low-l channels
  double defect_s = 3.1311804;
  double defect_p = 2.6548849;
  double defect_d = 1.34809171;
  // evaluate the p-wave scattering volume at the local collision momentum
  // k(R); when false the volume is frozen at its value at p_fixed_k (no
  // resonance enhancement)
  bool energy_dependent_p = true;
  double p_fixed_k = 0.03;  // a.u., used only when energy_dependent_p = false
  std::vector<double> r_eval;  // m; empty selects a default grid
};

struct SpReport {
  int basis_size = 0;
  double min_overlap = 1.0;  // worst adiabatic-continuation overlap
  std::vector<double> discontinuities;  // radii with overlap < 0.5
  std::string warning;
};

namespace detail {

struct SpBasisState {
  int nu = 0, l = 0;
  double defect = 0.0;
  double e_au = 0.0;
  std::vector<double> u_at;   // u(R) on the evaluation grid (a.u.)
  std::vector<double> du_at;  // u'(R) on the evaluation grid (a.u.)
};

// Inward Numerov integration at the fixed (quantum-defect or hydrogenic)
// energy, sampled onto the evaluation grid.  Below the inner centrifugal
// turning point the inward sweep picks up the exploding irregular solution;
// the sweep is truncated where the magnitude starts growing again and the
// state is zero there (its physical amplitude is negligible).
inline void sp_sample_state(SpBasisState& st,
                            const std::vector<double>& r_eval_au,
                            double r_lo_au) {
  double ns = st.nu - st.defect;
  double e = -0.5 / (ns * ns);
  st.e_au = e;
  double ll = static_cast<double>(st.l) * (st.l + 1);
  double disc = std::max(0.0, 1.0 + 2.0 * e * ll);
  double r_out = (1.0 + std::sqrt(disc)) / (-2.0 * e);
  double r_in = (1.0 - std::sqrt(disc)) / (-2.0 * e);
  double r_max = 1.25 * r_out + 45.0 / std::sqrt(-2.0 * e);
  double k_lo = std::sqrt(std::max(2.0 * (e + 1.0 / r_lo_au), 1e-12));
  double h = std::min(constants::pi / k_lo / 24.0, 2.0);
  auto n = static_cast<std::size_t>((r_max - r_lo_au) / h) + 1;

  rydberg::detail::NumerovWorkspace w;
  w.g.resize(n);
  w.u.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double r = r_lo_au + h * static_cast<double>(i);
    w.g[i] = h * h * (ll / (r * r) - 2.0 / r - 2.0 * e) / 12.0;
  }
  w.u[n - 1] = 1e-200;
  w.u[n - 2] = 1e-200 * std::exp(std::sqrt(std::max(w.g[n - 2], 0.0) * 12.0));
  rydberg::detail::numerov_sweep(w, static_cast<long>(n) - 1, 0);

  if (r_in > r_lo_au) {
    auto i_in = static_cast<std::size_t>((r_in - r_lo_au) / h);
    i_in = std::min(i_in, n - 1);
    double umin = std::abs(w.u[i_in]);
    std::size_t imin = i_in;
    for (std::size_t i = i_in; i-- > 0;) {
      double a = std::abs(w.u[i]);
      if (a < umin) {
        umin = a;
        imin = i;
      } else if (umin > 0.0 && a > 10.0 * umin) {
        for (std::size_t j = 0; j <= imin; ++j) w.u[j] = 0.0;
        break;
      }
    }
  }

  double umax = 0.0;
  for (double v : w.u) umax = std::max(umax, std::abs(v));
  if (umax == 0.0 || !std::isfinite(umax))
    throw NumericalError("sp basis state (" + std::to_string(st.nu) + "," +
                         std::to_string(st.l) + "): degenerate sweep");
  for (auto& v : w.u) v /= umax;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double wgt = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    s += wgt * w.u[i] * w.u[i];
  }
  double norm = 1.0 / std::sqrt(s * h);
  for (auto& v : w.u) v *= norm;

  st.u_at.resize(r_eval_au.size());
  st.du_at.resize(r_eval_au.size());
  auto sample = [&](double r) -> std::pair<double, double> {
    if (r <= r_lo_au || r >= r_lo_au + h * static_cast<double>(n - 2))
      return {0.0, 0.0};
    double x = (r - r_lo_au) / h;
    auto i = static_cast<std::size_t>(x);
    double f = x - static_cast<double>(i);
    double u = w.u[i] * (1.0 - f) + w.u[i + 1] * f;
    double dl = (i > 0) ? (w.u[i + 1] - w.u[i - 1]) / (2.0 * h)
                        : (w.u[i + 1] - w.u[i]) / h;
    double dr = (w.u[i + 2] - w.u[i]) / (2.0 * h);
    return {u, dl * (1.0 - f) + dr * f};
  };
  for (std::size_t j = 0; j < r_eval_au.size(); ++j) {
    auto [u, du] = sample(r_eval_au[j]);
    st.u_at[j] = u;
    st.du_at[j] = du;
  }
}

}  // namespace detail

inline PotentialCurve sp_wave_potential(const RydbergState& target,
                                        const ScatteringData& scat,
                                        const SpBasisSpec& spec = {},
                                        SpReport* report = nullptr) {
  namespace cn = constants;
  target.validate();
  if (target.l != 0)
    throw ConfigError("sp_wave_potential: only s-state targets are supported");

  const double a0 = cn::bohr_radius;
  const double ns_t = target.nu_star();
  const double e_t = target.energy_au();

  std::vector<double> r_eval = spec.r_eval;
  if (r_eval.empty()) {
    double lo = 0.03e-6, hi = 1.25 * target.r_ct(), dr = 1.0e-9;
    for (double r = lo; r <= hi; r += dr) r_eval.push_back(r);
  }
  std::vector<double> r_au(r_eval.size());
  for (std::size_t j = 0; j < r_eval.size(); ++j) r_au[j] = r_eval[j] / a0;

  // basis: full hydrogenic manifolds in a nu* window around the target plus
  // the quantum-defect s/p/d series falling inside the same window; the
  // target itself is always a member
  std::vector<detail::SpBasisState> basis;
  int n_floor = static_cast<int>(std::floor(ns_t));
  double win_lo = n_floor - spec.manifolds_below + 0.5;
  double win_hi = n_floor + spec.manifolds_above + 0.5;
  auto in_window = [&](double nstar) {
    return nstar >= win_lo && nstar <= win_hi;
  };
  int target_idx = -1;
  auto add = [&](int nu, int l, double defect) {
    if (nu == target.nu && l == target.l && defect == target.quantum_defect) {
      if (target_idx >= 0) return;
      target_idx = static_cast<int>(basis.size());
    }
    basis.push_back({nu, l, defect});
  };
  add(target.nu, target.l, target.quantum_defect);
  struct Channel {
    int l;
    double defect;
  } channels[] = {{0, spec.defect_s}, {1, spec.defect_p}, {2, spec.defect_d}};
  for (auto ch : channels)
    for (int nu = n_floor - spec.manifolds_below; nu <= n_floor + 8; ++nu) {
      if (nu < ch.l + 1) continue;
      if (!in_window(nu - ch.defect)) continue;
      add(nu, ch.l, ch.defect);
    }
  for (int n = n_floor - spec.manifolds_below + 1;
       n <= n_floor + spec.manifolds_above; ++n) {
    if (!in_window(n)) continue;
    int lcap = (spec.l_max >= 0) ? std::min(spec.l_max, n - 1) : n - 1;
    for (int l = 3; l <= lcap; ++l) add(n, l, 0.0);
  }

  const double r_lo_au = 100.0;
  for (auto& st : basis) detail::sp_sample_state(st, r_au, r_lo_au);
  const std::size_t nb = basis.size();

  if (report) {
    report->basis_size = static_cast<int>(nb);
    if (spec.manifolds_below + spec.manifolds_above < 4 && nb > 1)
      report->warning = "basis spans only " +
                        std::to_string(spec.manifolds_below +
                                       spec.manifolds_above) +
                        " manifolds; eigenvalues may not be converged";
  }

  // fixed p-wave volume for the non-resonant switch (a.u.)
  double ap3_fixed = 0.0;
  if (!spec.energy_dependent_p && scat.has_p_table())
    ap3_fixed = scat.a_p_cubed(spec.p_fixed_k / a0) / (a0 * a0 * a0);

  PotentialCurve out;
  out.kind = CurveKind::SP_WAVE;
  out.nu = target.nu;
  out.l = target.l;
  out.r = r_eval;
  out.v.assign(r_eval.size(), 0.0);
  out.r_ct = target.r_ct();
  out.r_min_marker = shape_resonance_radius(target, shape_resonance_energy);

  std::vector<double> aw(nb), bw(nb), x(nb), x_prev;
  std::vector<double> poles, f_samples;
  const double window = 3.0 / (ns_t * ns_t * ns_t);

  for (std::size_t jj = r_eval.size(); jj-- > 0;) {
    double R = r_au[jj];
    double k_si = rydberg::electron_momentum(target, r_eval[jj]);
    double c_a = 2.0 * cn::pi * scat.a_s(k_si) / a0;
    double c_b = 6.0 * cn::pi *
                 (spec.energy_dependent_p
                      ? scat.a_p_cubed(k_si) / (a0 * a0 * a0)
                      : ap3_fixed);

    for (std::size_t i = 0; i < nb; ++i) {
      double ang = std::sqrt((2.0 * basis[i].l + 1.0) / (4.0 * cn::pi));
      aw[i] = ang * basis[i].u_at[jj] / R;
      bw[i] = ang * (basis[i].du_at[jj] / R - basis[i].u_at[jj] / (R * R));
    }

    auto secular = [&](double lam, double m[4]) {
      double g11 = 0.0, g12 = 0.0, g22 = 0.0;
      for (std::size_t i = 0; i < nb; ++i) {
        double inv = 1.0 / (basis[i].e_au - lam);
        g11 += aw[i] * aw[i] * inv;
        g12 += aw[i] * bw[i] * inv;
        g22 += bw[i] * bw[i] * inv;
      }
      m[0] = 1.0 + c_a * g11;
      m[1] = c_a * g12;
      m[2] = c_b * g12;
      m[3] = 1.0 + c_b * g22;
      return m[0] * m[3] - m[1] * m[2];
    };
    auto fdet = [&](double lam) {
      double m[4];
      return secular(lam, m);
    };

    // the selected branch lives between the target level and the nearest
    // unperturbed level below it (the 131d level for the 133s target); both
    // attractive couplings push eigenvalues down, so the state connected to
    // the target at weak coupling stays inside this interval, and in the
    // strong p-wave coupling limit near the shape resonance it dives towards
    // the interval bottom
    double e_lower = e_t - window;
    for (std::size_t i = 0; i < nb; ++i)
      if (basis[i].e_au < e_t - 1e-13 && basis[i].e_au > e_lower)
        e_lower = basis[i].e_au;

    std::vector<double> roots;
    auto eigvec = [&](double lam) {
      double m[4];
      secular(lam, m);
      double y0, y1;
      if (m[0] * m[0] + m[1] * m[1] >= m[2] * m[2] + m[3] * m[3]) {
        y0 = -m[1];
        y1 = m[0];
      } else {
        y0 = -m[3];
        y1 = m[2];
      }
      double nrm = 0.0;
      for (std::size_t i = 0; i < nb; ++i) {
        x[i] = (c_a * aw[i] * y0 + c_b * bw[i] * y1) / (basis[i].e_au - lam);
        nrm += x[i] * x[i];
      }
      if (nrm <= 0.0) return false;
      nrm = 1.0 / std::sqrt(nrm);
      for (auto& v : x) v *= nrm;
      return true;
    };
    auto overlap_target = [&]() {
      return std::abs(x[static_cast<std::size_t>(target_idx)]);
    };
    auto overlap_prev = [&]() {
      if (x_prev.empty()) return overlap_target();
      double s = 0.0;
      for (std::size_t i = 0; i < nb; ++i) s += x[i] * x_prev[i];
      return std::abs(s);
    };

    // scan an inter-pole interval for sign changes of the determinant, with
    // geometric refinement toward both endpoints (the weak-coupling root
    // hugs the target pole to within machine resolution)
    auto scan_interval = [&](double lo, double hi) {
      double w = hi - lo;
      f_samples.clear();
      for (int m = 18; m >= 1; --m) {
        double lam = lo + w * std::pow(10.0, -m);
        if (lam > lo) f_samples.push_back(lam);
      }
      for (int m = 1; m < 32; ++m) f_samples.push_back(lo + w * m / 32.0);
      for (int m = 1; m <= 18; ++m) {
        double lam = hi - w * std::pow(10.0, -m);
        if (lam < hi) f_samples.push_back(lam);
      }
      std::sort(f_samples.begin(), f_samples.end());
      f_samples.erase(std::unique(f_samples.begin(), f_samples.end()),
                      f_samples.end());
      double prev_lam = f_samples.front(), prev_f = fdet(prev_lam);
      for (std::size_t s = 1; s < f_samples.size(); ++s) {
        double lam = f_samples[s], f = fdet(lam);
        if (std::isfinite(prev_f) && std::isfinite(f) &&
            std::signbit(prev_f) != std::signbit(f)) {
          double blo = prev_lam, bhi = lam, flo = prev_f;
          for (int it = 0; it < 64; ++it) {
            double mid = 0.5 * (blo + bhi);
            double fm = fdet(mid);
            if (std::signbit(fm) == std::signbit(flo))
              blo = mid;
            else
              bhi = mid;
          }
          roots.push_back(0.5 * (blo + bhi));
        }
        prev_lam = lam;
        prev_f = f;
      }
    };
    scan_interval(e_lower, e_t);
    if (roots.empty()) {
      // repulsive net coupling pushes the target root above its level
      double e_upper = e_t + window;
      for (std::size_t i = 0; i < nb; ++i)
        if (basis[i].e_au > e_t + 1e-13 && basis[i].e_au < e_upper)
          e_upper = basis[i].e_au;
      scan_interval(e_t, e_upper);
    }

    double lam_best;
    if (roots.empty()) {
      // couplings too weak to resolve against the pole: first-order shift
      std::size_t t = static_cast<std::size_t>(target_idx);
      lam_best = e_t + c_a * aw[t] * aw[t] + c_b * bw[t] * bw[t];
      std::fill(x.begin(), x.end(), 0.0);
      x[t] = 1.0;
    } else {
      lam_best = *std::min_element(roots.begin(), roots.end());
      if (!eigvec(lam_best)) {
        std::fill(x.begin(), x.end(), 0.0);
        x[static_cast<std::size_t>(target_idx)] = 1.0;
      }
    }
    double ov_cont = overlap_prev();
    x_prev = x;

    if (report) {
      report->min_overlap = std::min(report->min_overlap, ov_cont);
      if (ov_cont < 0.5) report->discontinuities.push_back(r_eval[jj]);
    }
    out.v[jj] = (lam_best - e_t) * cn::hartree_to_hz;
  }

  return out;
}

}  // namespace awia::potentials
