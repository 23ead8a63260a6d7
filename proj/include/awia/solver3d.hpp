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
#include "awia/rasterize.hpp"

namespace awia::solver {

namespace cn = awia::constants;

struct TrapSpec {
  double omega_x = 0.0, omega_y = 0.0, omega_z = 0.0;  // rad/s
  double mass = cn::m_rb87;

  double energy(double x, double y, double z) const {  // J
    return 0.5 * mass *
           (omega_x * omega_x * x * x + omega_y * omega_y * y * y +
            omega_z * omega_z * z * z);
  }
};

enum class Scheme { STRANG_SPLIT, RK4_INTERACTION_PICTURE };

// Time-step plan. The stiff term is the impurity potential: the local phase
// advance per step must stay small, dt * 2 pi * max|V_Hz| <= 0.1 rad.
// dt_free applies while the impurity is off (eta ~ 0), where the limit is
// set by mu instead and much larger steps are accurate.
struct StepPlan {
  double dt = 0.0;       // s, impurity on
  double dt_free = 0.0;  // s, impurity off; 0 means "same as dt"
  Scheme scheme = Scheme::STRANG_SPLIT;

  static double max_dt_for(double vmax_hz) {
    return 0.1 / (2.0 * cn::pi * vmax_hz);
  }

  double free_dt() const { return dt_free > 0.0 ? dt_free : dt; }

  void validate(double vmax_hz) const {
    if (!(dt > 0.0)) throw ConfigError("StepPlan: dt must be > 0");
    if (scheme != Scheme::STRANG_SPLIT)
      throw ConfigError("StepPlan: only the Strang splitting is implemented");
    if (vmax_hz > 0.0 && dt * 2.0 * cn::pi * vmax_hz > 0.1 * (1.0 + 1e-12))
      throw ConfigError(
          "StepPlan: dt does not resolve the potential; need dt <= " +
          std::to_string(max_dt_for(vmax_hz)) + " s for |V| = " +
          std::to_string(vmax_hz) + " Hz");
  }
};

// Absorbing layer over the outer fraction of the box (off by default): a
// negative imaginary potential ramping quadratically from the edge of the
// interior region, to swallow outgoing waves before they wrap around.
struct SpongeSpec {
  bool enabled = false;
  double width_fraction = 0.05;  // of the box, per side, per axis
  double strength_hz = 5e4;      // damping rate at the very edge
};

// Strang split-step propagator for the impurity GPE
//   i hbar dphi/dt = (-hbar^2/2m lap + W + U0|phi|^2 + eta h V
//                     - i hbar K3/2 |phi|^4) phi.
// Half kinetic (spectral), full local term as an exact exponential with the
// density frozen at substep start, half kinetic. The printed loss term
// carries the opposite sign; this implements decay.
class Solver3d {
 public:
  Solver3d(const Lattice3& grid, const TrapSpec& trap, double u0,
           double k3 = 0.0, const SpongeSpec& sponge = {})
      : grid_(grid), trap_(trap), u0_(u0), k3_(k3), fft_(grid) {
    if (!(u0 > 0.0)) throw ConfigError("Solver3d: u0 must be > 0");
    if (k3 < 0.0) throw ConfigError("Solver3d: k3 must be >= 0");
    kin_.resize(grid.size());
    w_.resize(grid.size());
    std::size_t idx = 0;
    for (int i = 0; i < grid.n[0]; ++i)
      for (int j = 0; j < grid.n[1]; ++j)
        for (int k = 0; k < grid.n[2]; ++k, ++idx) {
          double kx = grid.wavenumber(0, i);
          double ky = grid.wavenumber(1, j);
          double kz = grid.wavenumber(2, k);
          kin_[idx] = cn::hbar * cn::hbar * (kx * kx + ky * ky + kz * kz) /
                      (2.0 * trap.mass);  // J
          w_[idx] = trap.energy(grid.coord(0, i), grid.coord(1, j),
                                grid.coord(2, k));
        }
    if (sponge.enabled) {
      sponge_.resize(grid.size());
      idx = 0;
      for (int i = 0; i < grid.n[0]; ++i)
        for (int j = 0; j < grid.n[1]; ++j)
          for (int k = 0; k < grid.n[2]; ++k, ++idx) {
            double s = 0.0;
            int ijk[3] = {i, j, k};
            for (int a = 0; a < 3; ++a) {
              double half = 0.5 * grid.extent(a);
              double edge = half * (1.0 - 2.0 * sponge.width_fraction);
              double x = std::abs(grid.coord(a, ijk[a]));
              if (x > edge) {
                double q = (x - edge) / (half - edge);
                s += q * q;
              }
            }
            sponge_[idx] = 2.0 * cn::pi * sponge.strength_hz * s;  // rad/s
          }
    }
  }

  const Lattice3& grid() const { return grid_; }
  double u0() const { return u0_; }
  double k3() const { return k3_; }

  // One Strang step of length dt. imp may be null (no impurity); eta scales
  // it (evaluate eta at t + dt/2 for second-order accuracy in time).
  void step(LatticeField& f, double dt,
            const potentials::PotentialField* imp = nullptr, double eta = 0.0) {
    check_field(f, imp);
    if (!(dt > 0.0)) throw ConfigError("Solver3d::step: dt must be > 0");
    half_kinetic(f, dt);
    apply_local(f, dt, imp, eta);
    half_kinetic(f, dt);
    f.time += dt;
    if (!std::isfinite(std::norm(f.psi[0])) || !finite_sum(f))
      throw NumericalError("Solver3d: non-finite field at t = " +
                           std::to_string(f.time) + " s");
  }

  // One imaginary-time step of length tau followed by renormalization to
  // target_atoms; used by the ground-state search.
  void imaginary_step(LatticeField& f, double tau, double target_atoms) {
    check_field(f, nullptr);
    auto& buf = fft_.buffer();
    std::copy(f.psi.begin(), f.psi.end(), buf.begin());
    fft_.forward();
    for (std::size_t i = 0; i < buf.size(); ++i)
      buf[i] *= std::exp(-kin_[i] * tau / (2.0 * cn::hbar));
    fft_.backward();
    for (std::size_t i = 0; i < buf.size(); ++i) {
      double rho = std::norm(buf[i]);
      buf[i] *= std::exp(-(w_[i] + u0_ * rho) * tau / cn::hbar);
    }
    std::copy(buf.begin(), buf.end(), f.psi.begin());
    fft_.forward();
    for (std::size_t i = 0; i < buf.size(); ++i)
      buf[i] *= std::exp(-kin_[i] * tau / (2.0 * cn::hbar));
    fft_.backward();
    std::copy(buf.begin(), buf.end(), f.psi.begin());
    double n = f.atom_count();
    if (!(n > 0.0) || !std::isfinite(n))
      throw NumericalError("imaginary_step: field collapsed");
    double s = std::sqrt(target_atoms / n);
    for (auto& c : f.psi) c *= s;
  }

  // GPE energy functional (J): kinetic + trap + impurity + interaction.
  double energy(const LatticeField& f,
                const potentials::PotentialField* imp = nullptr,
                double eta = 0.0) {
    check_field(f, imp);
    auto& buf = fft_.buffer();
    std::copy(f.psi.begin(), f.psi.end(), buf.begin());
    fft_.forward();
    double ekin = 0.0;
    for (std::size_t i = 0; i < buf.size(); ++i)
      ekin += kin_[i] * std::norm(buf[i]);
    ekin *= f.grid.cell_volume() / static_cast<double>(buf.size());
    double eloc = 0.0;
    for (std::size_t i = 0; i < f.psi.size(); ++i) {
      double rho = std::norm(f.psi[i]);
      double v = w_[i] + 0.5 * u0_ * rho;
      if (imp != nullptr) v += eta * cn::h_planck * imp->v[i];
      eloc += v * rho;
    }
    eloc *= f.grid.cell_volume();
    return ekin + eloc;
  }

 private:
  void check_field(const LatticeField& f,
                   const potentials::PotentialField* imp) const {
    f.validate();
    if (f.grid != grid_)
      throw ConfigError("Solver3d: field grid does not match the solver");
    if (imp != nullptr && imp->grid != grid_)
      throw ConfigError("Solver3d: potential grid does not match the solver");
  }

  bool finite_sum(const LatticeField& f) const {
    double s = 0.0;
    for (const auto& c : f.psi) s += std::norm(c);
    return std::isfinite(s);
  }

  void half_kinetic(LatticeField& f, double dt) {
    if (dt != cached_dt_) {
      kin_phase_.resize(kin_.size());
      for (std::size_t i = 0; i < kin_.size(); ++i) {
        double th = -kin_[i] * dt / (2.0 * cn::hbar);
        kin_phase_[i] = cplx(std::cos(th), std::sin(th));
      }
      cached_dt_ = dt;
    }
    auto& buf = fft_.buffer();
    std::copy(f.psi.begin(), f.psi.end(), buf.begin());
    fft_.forward();
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= kin_phase_[i];
    fft_.backward();
    std::copy(buf.begin(), buf.end(), f.psi.begin());
  }

  void apply_local(LatticeField& f, double dt,
                   const potentials::PotentialField* imp, double eta) {
    const double* v = (imp != nullptr) ? imp->v.data() : nullptr;
    for (std::size_t i = 0; i < f.psi.size(); ++i) {
      double rho = std::norm(f.psi[i]);
      double e = w_[i] + u0_ * rho;  // J
      if (v != nullptr) e += eta * cn::h_planck * v[i];
      double th = -e * dt / cn::hbar;
      double amp = 1.0;
      if (k3_ > 0.0) amp = std::exp(-0.5 * k3_ * rho * rho * dt);
      if (!sponge_.empty()) amp *= std::exp(-sponge_[i] * dt);
      f.psi[i] *= amp * cplx(std::cos(th), std::sin(th));
    }
  }

  Lattice3 grid_;
  TrapSpec trap_;
  double u0_, k3_;
  Fft3 fft_;
  std::vector<double> kin_;  // hbar^2 k^2 / 2m, J
  std::vector<double> w_;    // trap energy, J
  std::vector<double> sponge_;  // damping rate, rad/s (empty = off)
  std::vector<cplx> kin_phase_;
  double cached_dt_ = -1.0;
};

// Ground state by imaginary-time evolution at fixed atom number; converges
// when the relative energy change per step drops below tol. tau must keep
// mu tau / hbar well below 1 or the split flow stops being a descent and
// can stall on a spurious structured state (tau ~ 0.2 hbar/mu is safe).
inline LatticeField ground_state_imaginary(Solver3d& solver, LatticeField f,
                                           double tau, int max_iter = 20000,
                                           double tol = 1e-10) {
  double target = f.atom_count();
  double e_prev = solver.energy(f);
  for (int it = 0; it < max_iter; ++it) {
    solver.imaginary_step(f, tau, target);
    double e = solver.energy(f);
    if (std::abs(e - e_prev) <= tol * std::abs(e_prev)) {
      f.time = 0.0;
      return f;
    }
    e_prev = e;
  }
  throw NumericalError(
      "ground_state_imaginary: no convergence within the iteration budget");
}

}  // namespace awia::solver
