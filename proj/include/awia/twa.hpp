#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "awia/constants.hpp"
#include "awia/errors.hpp"
#include "awia/fft.hpp"
#include "awia/field.hpp"
#include "awia/grid.hpp"
#include "awia/rng.hpp"

namespace awia::twa {

namespace cn = awia::constants;

// Bogoliubov modes of the homogeneous condensate on the periodic lattice.
// Mode functions are plane waves e^{ikR}/sqrt(V); u, v are the (real,
// positive) dimensionless amplitudes, |u|^2 - |v|^2 = 1.
struct BogoliubovModeSet {
  Lattice3 grid;
  double rho0 = 0.0, u0 = 0.0;
  std::vector<std::size_t> index;  // lattice index of each retained mode
  std::vector<double> u, v;
  std::vector<double> eps;  // J

  std::size_t count() const { return index.size(); }
  // restricted-basis commutator density: one plane-wave mode per retained
  // noise mode, |phi_k(R)|^2 = 1/V each
  double delta_c() const {
    return static_cast<double>(count()) / grid.volume();
  }
};

// k_cut <= 0 keeps every nonzero lattice mode; otherwise modes with
// 0 < |k| <= k_cut (rad/m). k = 0 is the condensate and carries no noise.
inline BogoliubovModeSet bogoliubov_modes(const Lattice3& grid, double rho0,
                                          double u0, double k_cut = 0.0) {
  if (grid.size() == 0) throw ConfigError("bogoliubov_modes: empty grid");
  if (!(rho0 > 0.0) || !(u0 > 0.0))
    throw ConfigError("bogoliubov_modes: rho0 and u0 must be > 0");
  BogoliubovModeSet m;
  m.grid = grid;
  m.rho0 = rho0;
  m.u0 = u0;
  double g = u0 * rho0;  // J
  std::size_t idx = 0;
  for (int i = 0; i < grid.n[0]; ++i)
    for (int j = 0; j < grid.n[1]; ++j)
      for (int k = 0; k < grid.n[2]; ++k, ++idx) {
        double kx = grid.wavenumber(0, i);
        double ky = grid.wavenumber(1, j);
        double kz = grid.wavenumber(2, k);
        double k2 = kx * kx + ky * ky + kz * kz;
        if (k2 == 0.0) continue;
        if (k_cut > 0.0 && k2 > k_cut * k_cut) continue;
        double ek = cn::hbar * cn::hbar * k2 / (2.0 * cn::m_rb87);
        double eps = std::sqrt(ek * (ek + 2.0 * g));
        double lk = ek + g;
        m.index.push_back(idx);
        m.u.push_back(std::sqrt((lk + eps) / (2.0 * eps)));
        // lk - eps can round slightly negative when the interaction is weak
        m.v.push_back(std::sqrt(std::max(0.0, (lk - eps) / (2.0 * eps))));
        m.eps.push_back(eps);
      }
  return m;
}

// One stochastic-field sample,
//   alpha(R) = phi0 + sum_k [eta_k u_k(R) - eta_k^* v_k^*(R)] / sqrt(2),
// with eta_k complex Gaussian, <eta_k eta_l^*> = delta_kl, <eta eta> = 0.
inline LatticeField wigner_initial_state(const BogoliubovModeSet& m,
                                         double rho0, std::uint64_t seed,
                                         std::uint64_t traj = 0) {
  const Lattice3& g = m.grid;
  LatticeField f;
  f.grid = g;
  f.rho0 = rho0;
  f.mu = m.u0 * rho0;
  f.psi.assign(g.size(), cplx(0.0, 0.0));
  if (m.count() > 0) {
    auto eng = rng::make_engine(seed, "noise", traj);
    // scatter the mode amplitudes in k space, then one inverse FFT.
    // backward() divides by N, so the k-space entry for a contribution
    // c e^{ikR}/sqrt(V) is c N / sqrt(V).
    Fft3 fft(g);
    auto& buf = fft.buffer();
    std::fill(buf.begin(), buf.end(), cplx(0.0, 0.0));
    double scale = static_cast<double>(g.size()) / std::sqrt(g.volume());
    for (std::size_t q = 0; q < m.count(); ++q) {
      cplx eta(rng::normal01(eng), rng::normal01(eng));
      eta *= 0.5;  // sqrt(1/2) per quadrature, then the overall 1/sqrt(2)
      std::size_t kp = m.index[q];
      // -k lattice index: negate each component modulo n
      std::size_t tmp = kp;
      int kz = static_cast<int>(tmp % g.n[2]);
      tmp /= g.n[2];
      int ky = static_cast<int>(tmp % g.n[1]);
      int kx = static_cast<int>(tmp / g.n[1]);
      std::size_t km = g.index((g.n[0] - kx) % g.n[0], (g.n[1] - ky) % g.n[1],
                               (g.n[2] - kz) % g.n[2]);
      buf[kp] += eta * m.u[q] * scale;
      buf[km] -= std::conj(eta) * m.v[q] * scale;
    }
    fft.backward();
    std::copy(buf.begin(), buf.end(), f.psi.begin());
  }
  double sq = std::sqrt(rho0);
  for (auto& c : f.psi) c += sq;
  return f;
}

// Symmetric-ordering-corrected densities extracted from an ensemble.
struct WignerObservables {
  Lattice3 grid;
  double time = 0.0;
  int n_traj = 0;
  double delta_c = 0.0;              // m^-3
  std::vector<double> rho_t;         // m^-3
  std::vector<double> rho_c, rho_u;  // empty when split_valid is false
  std::vector<double> se_rho_t;      // standard error of rho_t per point
  double n_u = 0.0;                  // uncondensed atoms
  double se_n_u = 0.0;
  bool split_valid = false;
  std::string warning;
};

// Streaming moment accumulator for one observation time. Trajectories must
// be added in a fixed order (by index) for bit-reproducible reductions.
class EnsembleAccumulator {
 public:
  void add(const LatticeField& f) {
    if (n_ == 0) {
      grid_ = f.grid;
      time_ = f.time;
      mean_.assign(f.psi.size(), cplx(0.0, 0.0));
      m2_.assign(f.psi.size(), 0.0);
      m4_.assign(f.psi.size(), 0.0);
    } else if (f.grid != grid_) {
      throw ConfigError("EnsembleAccumulator: mixed grids");
    }
    for (std::size_t i = 0; i < f.psi.size(); ++i) {
      double r = std::norm(f.psi[i]);
      mean_[i] += f.psi[i];
      m2_[i] += r;
      m4_[i] += r * r;
    }
    ++n_;
  }

  int count() const { return n_; }

  WignerObservables finalize(const BogoliubovModeSet& modes) const {
    if (n_ == 0) throw ConfigError("EnsembleAccumulator: no trajectories");
    WignerObservables o;
    o.grid = grid_;
    o.time = time_;
    o.n_traj = n_;
    o.delta_c = modes.delta_c();
    std::size_t np = m2_.size();
    o.rho_t.resize(np);
    o.se_rho_t.assign(np, 0.0);
    double inv = 1.0 / n_;
    for (std::size_t i = 0; i < np; ++i) {
      double mean2 = m2_[i] * inv;
      o.rho_t[i] = mean2 - 0.5 * o.delta_c;
      if (n_ > 1) {
        double var = (m4_[i] - n_ * mean2 * mean2) / (n_ - 1);
        o.se_rho_t[i] = std::sqrt(std::max(0.0, var) * inv);
      }
    }
    if (n_ < 2) {
      o.split_valid = false;
      o.warning =
          "single trajectory: condensed/uncondensed split is undefined, "
          "returning total density only";
      return o;
    }
    o.split_valid = true;
    o.rho_c.resize(np);
    o.rho_u.resize(np);
    double dv = grid_.cell_volume();
    double nu = 0.0, var_nu = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
      o.rho_c[i] = std::norm(mean_[i] * inv);
      o.rho_u[i] = o.rho_t[i] - o.rho_c[i];
      nu += o.rho_u[i];
      var_nu += o.se_rho_t[i] * o.se_rho_t[i];
    }
    o.n_u = nu * dv;
    // crude upper bound treating points as independent
    o.se_n_u = std::sqrt(var_nu) * dv;
    return o;
  }

 private:
  int n_ = 0;
  Lattice3 grid_;
  double time_ = 0.0;
  std::vector<cplx> mean_;
  std::vector<double> m2_, m4_;
};

enum class PositionMode { RESAMPLE, SHARED };

struct EnsembleSpec {
  int n_traj = 2;
  std::uint64_t base_seed = 0;
  double mode_cutoff = 0.0;  // rad/m; <= 0 keeps all nonzero modes
  PositionMode position_mode = PositionMode::RESAMPLE;

  void validate() const {
    if (n_traj < 1) throw ConfigError("ensemble: n_traj must be >= 1");
  }
};

// Evolves one trajectory from its stochastic initial state; must call
// observe exactly once per observation time, in a fixed order.
using TrajectoryFn = std::function<void(
    int traj, LatticeField& f,
    const std::function<void(const LatticeField&)>& observe)>;

// Runs the ensemble sequentially with streaming reductions (one field-sized
// snapshot per observation time is buffered per trajectory, never the whole
// ensemble). Failed trajectories are skipped and counted; more than 1%
// failures aborts.
inline std::vector<WignerObservables> run_ensemble(
    const EnsembleSpec& spec, const BogoliubovModeSet& modes, double rho0,
    std::size_t n_times, const TrajectoryFn& evolve) {
  spec.validate();
  std::vector<EnsembleAccumulator> acc(n_times);
  int failures = 0;
  for (int t = 0; t < spec.n_traj; ++t) {
    auto f = wigner_initial_state(modes, rho0, spec.base_seed, t);
    std::vector<LatticeField> snaps;
    snaps.reserve(n_times);
    try {
      evolve(t, f, [&](const LatticeField& x) {
        if (snaps.size() >= n_times)
          throw ConfigError("run_ensemble: more observations than declared");
        snaps.push_back(x);
      });
      if (snaps.size() != n_times)
        throw NumericalError("run_ensemble: trajectory " + std::to_string(t) +
                             " produced " + std::to_string(snaps.size()) +
                             " of " + std::to_string(n_times) +
                             " observations");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      ++failures;
      if (failures * 100 > spec.n_traj)
        throw NumericalError(
            "run_ensemble: too many failed trajectories (last: " +
            std::string(e.what()) + ")");
      continue;
    }
    for (std::size_t s = 0; s < n_times; ++s) acc[s].add(snaps[s]);
  }
  std::vector<WignerObservables> out;
  out.reserve(n_times);
  for (auto& a : acc) out.push_back(a.finalize(modes));
  return out;
}

}  // namespace awia::twa
