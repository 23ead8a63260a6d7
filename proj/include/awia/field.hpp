#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "awia/constants.hpp"
#include "awia/errors.hpp"
#include "awia/grid.hpp"

namespace awia {

namespace cn = awia::constants;
using cplx = std::complex<double>;

// Condensate field on the periodic 3D lattice. psi carries units m^-3/2 so
// |psi|^2 is a number density; rho0/mu describe the homogeneous background
// the run started from (mu = U0 rho0).
struct LatticeField {
  Lattice3 grid;
  std::vector<cplx> psi;
  double time = 0.0;  // s
  double rho0 = 0.0;  // m^-3
  double mu = 0.0;    // J

  double atom_count() const {
    double s = 0.0;
    for (const auto& c : psi) s += std::norm(c);
    return s * grid.cell_volume();
  }

  std::vector<double> density() const {
    std::vector<double> rho(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) rho[i] = std::norm(psi[i]);
    return rho;
  }

  void validate() const {
    if (grid.size() == 0 || psi.size() != grid.size())
      throw ConfigError("LatticeField: psi size does not match the grid");
  }
};

// homogeneous background phi = sqrt(rho0), mu = u0 rho0
inline LatticeField homogeneous_field(const Lattice3& grid, double rho0,
                                      double u0) {
  if (!(rho0 > 0.0)) throw ConfigError("homogeneous_field: rho0 must be > 0");
  LatticeField f;
  f.grid = grid;
  f.psi.assign(grid.size(), cplx(std::sqrt(rho0), 0.0));
  f.rho0 = rho0;
  f.mu = u0 * rho0;
  return f;
}

// Shifted radial field ut(r) = u(r) - r sqrt(rho0) e^{-i mu t / hbar},
// where phi(R) = u(r)/r. ut vanishes at large r so it can be extended
// antisymmetrically and differentiated spectrally.
struct RadialField {
  RadialGrid grid;
  std::vector<cplx> ut;  // m^-1/2, on r_i = (i + 1/2) dr
  double time = 0.0;     // s
  double rho0 = 0.0;     // m^-3
  double mu = 0.0;       // J

  // background term r sqrt(rho0) e^{-i mu t / hbar} at node i
  cplx background(int i) const {
    double th = -mu * time / cn::hbar;
    return grid.r(i) * std::sqrt(rho0) * cplx(std::cos(th), std::sin(th));
  }

  cplx u(int i) const { return ut[i] + background(i); }

  double density(int i) const {
    double r = grid.r(i);
    return std::norm(u(i)) / (r * r);
  }

  std::vector<double> density() const {
    std::vector<double> rho(ut.size());
    for (std::size_t i = 0; i < ut.size(); ++i)
      rho[i] = density(static_cast<int>(i));
    return rho;
  }

  // int |u|^2 dr over the box (the homogeneous part alone diverges with the
  // box, so conservation checks compare this finite quantity)
  double norm_integral() const {
    double s = 0.0;
    for (std::size_t i = 0; i < ut.size(); ++i)
      s += std::norm(u(static_cast<int>(i)));
    return s * grid.dr;
  }

  void validate() const {
    if (grid.n <= 0 || ut.size() != static_cast<std::size_t>(grid.n))
      throw ConfigError("RadialField: ut size does not match the grid");
  }
};

inline RadialField homogeneous_radial_field(const RadialGrid& grid,
                                            double rho0, double u0) {
  if (!(rho0 > 0.0))
    throw ConfigError("homogeneous_radial_field: rho0 must be > 0");
  RadialField f;
  f.grid = grid;
  f.ut.assign(grid.n, cplx(0.0, 0.0));
  f.rho0 = rho0;
  f.mu = u0 * rho0;
  return f;
}

}  // namespace awia
