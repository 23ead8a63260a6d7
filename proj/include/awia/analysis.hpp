#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "awia/errors.hpp"
#include "awia/fft.hpp"
#include "awia/grid.hpp"

namespace awia::analysis {

// Isotropic Gaussian smoothing kernel, truncated radially.
struct SmoothingKernel {
  double sigma = 0.5e-6;    // m
  double truncation = 5.0;  // in multiples of sigma

  void validate(const Lattice3& grid) const {
    if (!(sigma > 0.0)) throw ConfigError("kernel: sigma must be > 0");
    if (!(truncation > 0.0))
      throw ConfigError("kernel: truncation must be > 0");
    double dmax = std::max({grid.d[0], grid.d[1], grid.d[2]});
    if (sigma < dmax)
      throw ConfigError(
          "kernel: sigma below the grid spacing would be a smoothing no-op");
  }
};

// Periodic convolution with the normalized kernel (FFT); preserves the mean
// of the field exactly up to roundoff.
inline std::vector<double> smooth(const std::vector<double>& field,
                                  const Lattice3& grid,
                                  const SmoothingKernel& kernel) {
  kernel.validate(grid);
  if (field.size() != grid.size())
    throw ConfigError("smooth: field size does not match the grid");

  std::vector<double> ker(grid.size(), 0.0);
  double rmax = kernel.truncation * kernel.sigma;
  double sum = 0.0;
  std::size_t idx = 0;
  for (int i = 0; i < grid.n[0]; ++i)
    for (int j = 0; j < grid.n[1]; ++j)
      for (int k = 0; k < grid.n[2]; ++k, ++idx) {
        // wrapped displacement from the origin cell
        int ijk[3] = {i, j, k};
        double r2 = 0.0;
        for (int a = 0; a < 3; ++a) {
          int m = ijk[a] <= grid.n[a] / 2 ? ijk[a] : ijk[a] - grid.n[a];
          double x = m * grid.d[a];
          r2 += x * x;
        }
        if (r2 > rmax * rmax) continue;
        ker[idx] = std::exp(-r2 / (2.0 * kernel.sigma * kernel.sigma));
        sum += ker[idx];
      }
  for (auto& x : ker) x /= sum;

  Fft3 fft(grid);
  auto& buf = fft.buffer();
  for (std::size_t q = 0; q < field.size(); ++q) buf[q] = field[q];
  fft.forward();
  std::vector<cplx> fhat(buf.begin(), buf.end());
  for (std::size_t q = 0; q < ker.size(); ++q) buf[q] = ker[q];
  fft.forward();
  for (std::size_t q = 0; q < buf.size(); ++q) buf[q] *= fhat[q];
  fft.backward();
  std::vector<double> out(field.size());
  for (std::size_t q = 0; q < out.size(); ++q) out[q] = buf[q].real();
  return out;
}

// 2D field on the x-y plane of a lattice
struct Field2d {
  int nx = 0, ny = 0;
  double dx = 0.0, dy = 0.0;
  std::vector<double> v;  // y fastest

  double& at(int i, int j) { return v[static_cast<std::size_t>(i) * ny + j]; }
  double at(int i, int j) const {
    return v[static_cast<std::size_t>(i) * ny + j];
  }
};

// rho_col(x, y) = integral dz rho(R) (plain sum times dz; the grid is
// periodic so this is the exact quadrature of the trigonometric interpolant)
inline Field2d column_density(const std::vector<double>& rho,
                              const Lattice3& grid) {
  if (rho.size() != grid.size())
    throw ConfigError("column_density: field size does not match the grid");
  Field2d out;
  out.nx = grid.n[0];
  out.ny = grid.n[1];
  out.dx = grid.d[0];
  out.dy = grid.d[1];
  out.v.assign(static_cast<std::size_t>(out.nx) * out.ny, 0.0);
  std::size_t idx = 0;
  for (int i = 0; i < grid.n[0]; ++i)
    for (int j = 0; j < grid.n[1]; ++j) {
      double s = 0.0;
      for (int k = 0; k < grid.n[2]; ++k, ++idx) s += rho[idx];
      out.at(i, j) = s * grid.d[2];
    }
  return out;
}

struct ContrastReport {
  double chi_c = 0.0;
  std::size_t max_index = 0, min_index = 0;  // linear indices (y fastest)
  double rho_c0 = 0.0;  // reference column density, m^-2
  double time = 0.0;    // s
};

// chi_c = [(max - min) of the relative column-density deviation] / 2, taken
// over the full plane; ties break toward the lowest linear index.
inline ContrastReport contrast(const Field2d& rel_deviation, double rho_c0,
                               double time = 0.0) {
  if (rel_deviation.v.empty())
    throw ConfigError("contrast: empty deviation field");
  if (!(rho_c0 > 0.0))
    throw ConfigError("contrast: reference column density must be > 0");
  ContrastReport rep;
  rep.rho_c0 = rho_c0;
  rep.time = time;
  double lo = rel_deviation.v[0], hi = rel_deviation.v[0];
  for (std::size_t q = 1; q < rel_deviation.v.size(); ++q) {
    double x = rel_deviation.v[q];
    if (x > hi) {
      hi = x;
      rep.max_index = q;
    }
    if (x < lo) {
      lo = x;
      rep.min_index = q;
    }
  }
  rep.chi_c = 0.5 * (hi - lo);
  return rep;
}

struct RadialProfile {
  std::vector<double> r;       // bin centres, m
  std::vector<double> sqrt_r;  // m^1/2, the paper-style axis
  std::vector<double> value;
  std::vector<long> count;
};

// Shell-binned average around the centre; bin width is the smallest grid
// spacing. Empty bins (possible near the origin) carry count 0 and value 0.
inline RadialProfile radial_profile(const std::vector<double>& field,
                                    const Lattice3& grid,
                                    const std::array<double, 3>& center) {
  if (field.size() != grid.size())
    throw ConfigError("radial_profile: field size does not match the grid");
  double dr = std::min({grid.d[0], grid.d[1], grid.d[2]});
  double rmax = 0.0;
  for (int a = 0; a < 3; ++a)
    rmax = std::max(rmax, 0.5 * grid.extent(a) + std::abs(center[a]));
  rmax *= std::sqrt(3.0);
  int nbin = static_cast<int>(rmax / dr) + 1;
  RadialProfile p;
  p.r.resize(nbin);
  p.sqrt_r.resize(nbin);
  p.value.assign(nbin, 0.0);
  p.count.assign(nbin, 0);
  for (int b = 0; b < nbin; ++b) {
    p.r[b] = (b + 0.5) * dr;
    p.sqrt_r[b] = std::sqrt(p.r[b]);
  }
  std::size_t idx = 0;
  for (int i = 0; i < grid.n[0]; ++i)
    for (int j = 0; j < grid.n[1]; ++j)
      for (int k = 0; k < grid.n[2]; ++k, ++idx) {
        double x = grid.coord(0, i) - center[0];
        double y = grid.coord(1, j) - center[1];
        double z = grid.coord(2, k) - center[2];
        int b = static_cast<int>(std::sqrt(x * x + y * y + z * z) / dr);
        if (b >= nbin) continue;
        p.value[b] += field[idx];
        ++p.count[b];
      }
  for (int b = 0; b < nbin; ++b)
    if (p.count[b] > 0) p.value[b] /= static_cast<double>(p.count[b]);
  return p;
}

}  // namespace awia::analysis
