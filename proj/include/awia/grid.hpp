#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "awia/constants.hpp"

namespace awia {

// Uniform periodic 3D lattice. Coordinates are cell-centred with the origin
// on the grid point (n/2, n/2, n/2); z is the fastest index.
struct Lattice3 {
  std::array<int, 3> n{0, 0, 0};
  std::array<double, 3> d{0.0, 0.0, 0.0};  // spacings, m

  std::size_t size() const {
    return static_cast<std::size_t>(n[0]) * n[1] * n[2];
  }
  double cell_volume() const { return d[0] * d[1] * d[2]; }
  double extent(int axis) const { return n[axis] * d[axis]; }
  double volume() const { return extent(0) * extent(1) * extent(2); }

  double coord(int axis, int i) const { return (i - n[axis] / 2) * d[axis]; }

  // FFT angular wavenumber of index j along an axis
  double wavenumber(int axis, int j) const {
    int m = (j <= n[axis] / 2) ? j : j - n[axis];
    return 2.0 * constants::pi * m / extent(axis);
  }

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n[1] + j) * n[2] + k;
  }

  bool operator==(const Lattice3&) const = default;
};

// Uniform radial grid, staggered so r = 0 is not a node:
// r_i = (i + 1/2) * dr, i in [0, n).
struct RadialGrid {
  int n = 0;
  double dr = 0.0;  // m

  double r(int i) const { return (i + 0.5) * dr; }
  double r_max() const { return n * dr; }
  bool operator==(const RadialGrid&) const = default;
};

}  // namespace awia
