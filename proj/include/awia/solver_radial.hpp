#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "awia/constants.hpp"
#include "awia/errors.hpp"
#include "awia/fft.hpp"
#include "awia/field.hpp"
#include "awia/grid.hpp"
#include "awia/potentials.hpp"

namespace awia::solver {

namespace cn = awia::constants;

// curve values (Hz) on the staggered radial nodes
inline std::vector<double> sample_curve(const potentials::PotentialCurve& c,
                                        const RadialGrid& grid) {
  c.validate();
  std::vector<double> v(grid.n);
  for (int i = 0; i < grid.n; ++i) v[i] = c.value(grid.r(i));
  return v;
}

// Split-step propagator for the shifted radial GPE: with
// u(r,t) = ut(r,t) + r sqrt(rho0) e^{-i mu t/hbar} and phi = u/r,
//   i hbar d ut/dt = -hbar^2/2m ut'' + g(r,t) u - mu (u - ut),
//   g = U0 |u|^2 / r^2 + eta h V(r).
// The local substep propagates u itself (the background picks up exactly
// its e^{-i mu t/hbar} phase when V = 0, making the homogeneous background
// a fixed point); the kinetic substep acts on ut, which vanishes at large r
// and is extended antisymmetrically to negative r so the FFT sees a smooth
// periodic function. Antisymmetry is re-imposed after every transform to
// kill roundoff leakage across r = 0.
class SolverRadial {
 public:
  SolverRadial(const RadialGrid& grid, double u0)
      : grid_(grid), u0_(u0), fft_(2 * grid.n) {
    if (grid.n < 2 || !(grid.dr > 0.0))
      throw ConfigError("SolverRadial: invalid radial grid");
    if (!(u0 > 0.0)) throw ConfigError("SolverRadial: u0 must be > 0");
    int n2 = 2 * grid.n;
    double len = n2 * grid.dr;
    kin_.resize(n2);
    kvec_.resize(n2);
    for (int j = 0; j < n2; ++j) {
      int m = (j <= n2 / 2) ? j : j - n2;
      double k = 2.0 * cn::pi * m / len;
      kvec_[j] = k;
      kin_[j] = cn::hbar * cn::hbar * k * k / (2.0 * cn::m_rb87);  // J
    }
  }

  const RadialGrid& grid() const { return grid_; }

  // |ut| leaking into the outer 5% of the box on the most recent step
  bool boundary_warning() const { return boundary_warning_; }

  void step(RadialField& f, double dt, const std::vector<double>& v_hz = {},
            double eta = 0.0) {
    check_field(f, v_hz);
    if (!(dt > 0.0)) throw ConfigError("SolverRadial::step: dt must be > 0");
    half_kinetic(f, dt);
    apply_local(f, dt, v_hz, eta);
    half_kinetic(f, dt);
    f.time += dt;
    double s = 0.0;
    for (const auto& c : f.ut) s += std::norm(c);
    if (!std::isfinite(s))
      throw NumericalError("SolverRadial: non-finite field at t = " +
                           std::to_string(f.time) + " s");
    update_boundary_flag(f);
  }

  // energy functional of u over the box (J per unit... integrated):
  // int dr [ hbar^2/2m |u'|^2 + eta h V |u|^2 + U0/(2 r^2) |u|^4 ]
  double energy(const RadialField& f, const std::vector<double>& v_hz = {},
                double eta = 0.0) {
    check_field(f, v_hz);
    // spectral d(ut)/dr on the antisymmetric extension
    auto& buf = fft_.buffer();
    load_extension(f, buf);
    fft_.forward();
    for (int j = 0; j < 2 * grid_.n; ++j) buf[j] *= cplx(0.0, kvec_[j]);
    fft_.backward();
    double th = -f.mu * f.time / cn::hbar;
    cplx sprime = std::sqrt(f.rho0) * cplx(std::cos(th), std::sin(th));
    double e = 0.0;
    for (int i = 0; i < grid_.n; ++i) {
      double r = grid_.r(i);
      cplx du = buf[grid_.n + i] + sprime;
      double u2 = std::norm(f.u(i));
      double ekin = cn::hbar * cn::hbar * std::norm(du) / (2.0 * cn::m_rb87);
      double epot = v_hz.empty() ? 0.0 : eta * cn::h_planck * v_hz[i] * u2;
      e += ekin + epot + 0.5 * u0_ * u2 * u2 / (r * r);
    }
    return e * grid_.dr;
  }

 private:
  void check_field(const RadialField& f, const std::vector<double>& v_hz) const {
    f.validate();
    if (f.grid != grid_)
      throw ConfigError("SolverRadial: field grid does not match the solver");
    if (!v_hz.empty() && v_hz.size() != static_cast<std::size_t>(grid_.n))
      throw ConfigError("SolverRadial: potential sampling does not match");
  }

  void load_extension(const RadialField& f, std::vector<cplx>& buf) const {
    for (int i = 0; i < grid_.n; ++i) {
      buf[grid_.n + i] = f.ut[i];
      buf[grid_.n - 1 - i] = -f.ut[i];
    }
  }

  void extract(RadialField& f, const std::vector<cplx>& buf) const {
    // re-antisymmetrize while reading back
    for (int i = 0; i < grid_.n; ++i)
      f.ut[i] = 0.5 * (buf[grid_.n + i] - buf[grid_.n - 1 - i]);
  }

  void half_kinetic(RadialField& f, double dt) {
    if (dt != cached_dt_) {
      kin_phase_.resize(kin_.size());
      for (std::size_t j = 0; j < kin_.size(); ++j) {
        double th = -kin_[j] * dt / (2.0 * cn::hbar);
        kin_phase_[j] = cplx(std::cos(th), std::sin(th));
      }
      cached_dt_ = dt;
    }
    auto& buf = fft_.buffer();
    load_extension(f, buf);
    fft_.forward();
    for (std::size_t j = 0; j < buf.size(); ++j) buf[j] *= kin_phase_[j];
    fft_.backward();
    extract(f, buf);
  }

  void apply_local(RadialField& f, double dt, const std::vector<double>& v_hz,
                   double eta) {
    double sq = std::sqrt(f.rho0);
    double th0 = -f.mu * f.time / cn::hbar;
    double th1 = -f.mu * (f.time + dt) / cn::hbar;
    cplx ph0(std::cos(th0), std::sin(th0));
    cplx ph1(std::cos(th1), std::sin(th1));
    for (int i = 0; i < grid_.n; ++i) {
      double r = grid_.r(i);
      cplx u = f.ut[i] + r * sq * ph0;
      double g = u0_ * std::norm(u) / (r * r);  // J, density frozen
      if (!v_hz.empty()) g += eta * cn::h_planck * v_hz[i];
      double th = -g * dt / cn::hbar;
      u *= cplx(std::cos(th), std::sin(th));
      f.ut[i] = u - r * sq * ph1;
    }
  }

  void update_boundary_flag(const RadialField& f) {
    double peak = 0.0;
    for (const auto& c : f.ut) peak = std::max(peak, std::abs(c));
    double outer = 0.0;
    int start = static_cast<int>(0.95 * grid_.n);
    for (int i = start; i < grid_.n; ++i)
      outer = std::max(outer, std::abs(f.ut[i]));
    // ignore fields that are zero up to roundoff of the background
    double floor = 1e-12 * std::sqrt(f.rho0) * grid_.r_max();
    boundary_warning_ = peak > floor && outer > 1e-3 * peak;
  }

  RadialGrid grid_;
  double u0_;
  Fft1 fft_;
  std::vector<double> kin_;   // J
  std::vector<double> kvec_;  // rad/m
  std::vector<cplx> kin_phase_;
  double cached_dt_ = -1.0;
  bool boundary_warning_ = false;
};

}  // namespace awia::solver
