#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "awia/errors.hpp"
#include "awia/grid.hpp"
#include "awia/potentials.hpp"

namespace awia::potentials {

// A radial curve sampled onto a 3D lattice around a centre point. Values
// stay in Hz like the curve; the solver converts when it builds phase
// factors.
struct PotentialField {
  Lattice3 grid;
  std::array<double, 3> center{0.0, 0.0, 0.0};  // m
  std::vector<double> v;                        // Hz, z fastest

  double integral() const {  // sum V dV, Hz m^3
    double s = 0.0;
    for (double x : v) s += x;
    return s * grid.cell_volume();
  }
};

namespace detail {

// O(1) curve lookup when the radial grid is uniform (the wavefunction grids
// are); falls back to the curve's own binary search otherwise.
struct CurveSampler {
  const PotentialCurve& c;
  bool uniform = false;
  double r0 = 0.0, inv_dr = 0.0;

  explicit CurveSampler(const PotentialCurve& curve) : c(curve) {
    if (c.r.size() < 2) return;
    double dr = c.r[1] - c.r[0];
    uniform = true;
    for (std::size_t i = 2; i < c.r.size() && uniform; i += 97)
      if (std::abs(c.r[i] - c.r[0] - static_cast<double>(i) * dr) > 1e-6 * dr)
        uniform = false;
    std::size_t last = c.r.size() - 1;
    if (std::abs(c.r[last] - c.r[0] - static_cast<double>(last) * dr) >
        1e-6 * dr)
      uniform = false;
    r0 = c.r[0];
    inv_dr = 1.0 / dr;
  }

  double operator()(double rq) const {
    if (!uniform) return c.value(rq);
    if (rq > c.r.back()) return 0.0;
    if (rq <= r0) return c.v.front();
    double f = (rq - r0) * inv_dr;
    auto i = static_cast<std::size_t>(f);
    if (i + 1 >= c.r.size()) return c.v.back();
    f -= static_cast<double>(i);
    return c.v[i] * (1.0 - f) + c.v[i + 1] * f;
  }
};

}  // namespace detail

// Samples curve(|R - center|) on the lattice. Pointwise by default; with
// cell_average = true each cell takes the mean over subdiv^3 uniformly
// placed interior points, which tames aliasing when the grid undersamples
// the radial oscillations.
inline PotentialField rasterize(const PotentialCurve& curve,
                                const Lattice3& grid,
                                const std::array<double, 3>& center,
                                bool cell_average = false, int subdiv = 4) {
  curve.validate();
  if (grid.size() == 0) throw ConfigError("rasterize: empty grid");
  if (cell_average && subdiv < 2)
    throw ConfigError("rasterize: cell averaging needs subdiv >= 2");
  for (int a = 0; a < 3; ++a) {
    double lo = grid.coord(a, 0) - 0.5 * grid.d[a];
    double hi = grid.coord(a, grid.n[a] - 1) + 0.5 * grid.d[a];
    if (center[a] < lo || center[a] > hi)
      throw ConfigError("rasterize: centre lies outside the grid box");
  }

  detail::CurveSampler sample(curve);
  PotentialField field;
  field.grid = grid;
  field.center = center;
  field.v.resize(grid.size());

  std::vector<double> offs;
  if (cell_average)
    for (int s = 0; s < subdiv; ++s)
      offs.push_back(((s + 0.5) / subdiv - 0.5));

  std::size_t idx = 0;
  for (int i = 0; i < grid.n[0]; ++i) {
    double x = grid.coord(0, i) - center[0];
    for (int j = 0; j < grid.n[1]; ++j) {
      double y = grid.coord(1, j) - center[1];
      double rho2 = x * x + y * y;
      for (int k = 0; k < grid.n[2]; ++k, ++idx) {
        double z = grid.coord(2, k) - center[2];
        if (!cell_average) {
          field.v[idx] = sample(std::sqrt(rho2 + z * z));
          continue;
        }
        double acc = 0.0;
        for (double ox : offs) {
          double xs = x + ox * grid.d[0];
          for (double oy : offs) {
            double ys = y + oy * grid.d[1];
            double p2 = xs * xs + ys * ys;
            for (double oz : offs) {
              double zs = z + oz * grid.d[2];
              acc += sample(std::sqrt(p2 + zs * zs));
            }
          }
        }
        field.v[idx] = acc / (offs.size() * offs.size() * offs.size());
      }
    }
  }
  return field;
}

}  // namespace awia::potentials
