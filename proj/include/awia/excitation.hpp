#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "awia/constants.hpp"
#include "awia/errors.hpp"
#include "awia/potentials.hpp"
#include "awia/rng.hpp"

namespace awia::excitation {

namespace cn = awia::constants;
using Vec3 = std::array<double, 3>;

// ---- pulse train ----

// One excitation cycle: excitation window t_exc, imprint window t_imp during
// which the impurity potential acts, ionisation window t_ion with the
// impurity removed. The pulse shape is
//   eta_bar(t) = [tanh((t - t_exc)/xi) + tanh((t_imp - t)/xi)] / 2,
// which switches on at t_exc and off at t_imp, so the on-time of one cycle
// is t_imp - t_exc (not t_imp; the fall marker is a time, not a duration).
struct ExcitationSchedule {
  int n_exc = 1;
  double t_exc = 0.5e-6;   // s
  double t_imp = 3.5e-6;   // s (switch-off time within the cycle)
  double t_ion = 0.8e-6;   // s
  double rise_time = 10e-9;  // s
  std::vector<Vec3> positions;  // m, one per excitation
  std::uint64_t rng_seed = 0;

  double period() const { return t_exc + t_imp + t_ion; }

  void validate() const {
    if (n_exc < 1) throw ConfigError("schedule: n_exc must be >= 1");
    if (!(period() > 0.0)) throw ConfigError("schedule: period must be > 0");
    if (!(rise_time > 0.0))
      throw ConfigError("schedule: rise_time must be > 0");
    if (!(t_imp > t_exc))
      throw ConfigError("schedule: t_imp must exceed t_exc (on-window empty)");
    if (positions.size() != static_cast<std::size_t>(n_exc))
      throw ConfigError("schedule: need exactly n_exc positions, got " +
                        std::to_string(positions.size()));
  }
};

// single-cycle pulse, t relative to the cycle start
inline double eta_bar(double t, const ExcitationSchedule& s) {
  return 0.5 * (std::tanh((t - s.t_exc) / s.rise_time) +
                std::tanh((s.t_imp - t) / s.rise_time));
}

// pulse train eta(t) = sum_n eta_bar(t - n tau) over the scheduled cycles
inline double eta(double t, const ExcitationSchedule& s) {
  double tau = s.period();
  int n0 = static_cast<int>(std::floor(t / tau));
  double v = 0.0;
  for (int n = n0 - 1; n <= n0 + 1; ++n) {  // tails of neighbours
    if (n < 0 || n >= s.n_exc) continue;
    v += eta_bar(t - n * tau, s);
  }
  return std::clamp(v, 0.0, 1.0);
}

// which excitation's position is (or was) active at time t
inline int window_index(double t, const ExcitationSchedule& s) {
  int n = static_cast<int>(std::floor(t / s.period()));
  return std::clamp(n, 0, s.n_exc - 1);
}

// ---- Thomas-Fermi cloud ----

// Cigar-shaped trap: radial frequency omega_r in the x-z plane, axial
// omega_y along y. Density rho = max(0, mu - m/2 (w_r^2 (x^2+z^2)
// + w_y^2 y^2)) / u0.
struct CloudSpec {
  double mu = 0.0;       // J
  double omega_r = 0.0;  // rad/s
  double omega_y = 0.0;  // rad/s
  double atom_count = 0.0;  // physical N represented by a sampled cloud
  double u0 = 0.0;       // J m^3
  double mass = cn::m_rb87;

  double peak_density() const { return mu / u0; }
  double y_max() const { return std::sqrt(2.0 * mu / (mass * omega_y * omega_y)); }
  double r_max() const { return std::sqrt(2.0 * mu / (mass * omega_r * omega_r)); }
  double r_max_at(double y) const {
    double f = 1.0 - (y * y) / (y_max() * y_max());
    return f > 0.0 ? r_max() * std::sqrt(f) : 0.0;
  }

  double density(const Vec3& p) const {
    double q = (p[0] * p[0] + p[2] * p[2]) / (r_max() * r_max()) +
               p[1] * p[1] / (y_max() * y_max());
    return q < 1.0 ? peak_density() * (1.0 - q) : 0.0;
  }

  // Thomas-Fermi atom number of the analytic profile
  double tf_atom_count() const {
    return peak_density() * (8.0 * cn::pi / 15.0) * r_max() * r_max() * y_max();
  }

  void validate() const {
    if (!(mu > 0.0)) throw ConfigError("cloud: mu must be > 0");
    if (!(u0 > 0.0)) throw ConfigError("cloud: u0 must be > 0");
    if (!(omega_r > 0.0) || !(omega_y > 0.0))
      throw ConfigError("cloud: trap frequencies must be > 0");
    if (!(atom_count > 0.0))
      throw ConfigError("cloud: atom_count must be > 0");
  }
};

// Inverse-CDF sampling of the Thomas-Fermi profile: axial coordinate y from
// its marginal (proportional to (1 - y^2/y_max^2)^2, inverted by bisection),
// then the transverse radius from the conditional disc profile (closed
// form), then a uniform azimuth.
inline std::vector<Vec3> sample_cloud_atoms(const CloudSpec& spec, int count,
                                            std::mt19937_64& eng) {
  spec.validate();
  if (count < 1) throw ConfigError("sample_cloud_atoms: count must be >= 1");
  double ym = spec.y_max();
  // CDF of the y marginal on [-1, 1] in units of y_max:
  // F(s) = (15/16) * (s - 2 s^3/3 + s^5/5) + 1/2
  auto cdf_y = [](double s) {
    return 0.9375 * (s - 2.0 * s * s * s / 3.0 + std::pow(s, 5) / 5.0) + 0.5;
  };
  std::vector<Vec3> out(count);
  for (auto& p : out) {
    double u = rng::uniform01(eng);
    double lo = -1.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      (cdf_y(mid) < u ? lo : hi) = mid;
    }
    double y = 0.5 * (lo + hi) * ym;
    // conditional transverse CDF: F(r) = (r/rm)^2 (2 - (r/rm)^2)
    double rm = spec.r_max_at(y);
    double c = rng::uniform01(eng);
    double r = rm * std::sqrt(1.0 - std::sqrt(std::max(0.0, 1.0 - c)));
    double phi = 2.0 * cn::pi * rng::uniform01(eng);
    p = {r * std::cos(phi), y, r * std::sin(phi)};
  }
  return out;
}

inline std::vector<Vec3> sample_cloud_atoms(const CloudSpec& spec, int count,
                                            std::uint64_t seed) {
  auto eng = rng::make_engine(seed, "cloud");
  return sample_cloud_atoms(spec, count, eng);
}

// ---- excitation laser ----

// Gaussian beam propagating along x (focus at the origin), with a Gaussian
// line shape in the detuning. The line-shape exponent is (E - Ebar)^2 /
// dE^2, without a factor 2.
struct BeamSpec {
  double waist = 1.5e-6;        // m
  double wavelength = 0.48e-6;  // m
  double detuning_center = -55e6;  // Hz
  double linewidth = 1e6;          // Hz

  double rayleigh() const { return cn::pi * waist * waist / wavelength; }
  double width_at(double x) const {
    double q = x / rayleigh();
    return waist * std::sqrt(1.0 + q * q);
  }
  // relative intensity, 1 on axis at the focus
  double intensity(const Vec3& p) const {
    double w = width_at(p[0]);
    double rp2 = p[1] * p[1] + p[2] * p[2];
    return (waist * waist) / (w * w) * std::exp(-2.0 * rp2 / (w * w));
  }
  double line_shape(double shift_hz) const {
    double q = (shift_hz - detuning_center) / linewidth;
    return std::exp(-q * q);
  }
  void validate() const {
    if (!(waist > 0.0) || !(wavelength > 0.0) || !(linewidth > 0.0))
      throw ConfigError("beam: waist, wavelength and linewidth must be > 0");
  }
};

// Density-induced line shift at each cloud atom: the pairwise sum of the
// impurity potential over the other sampled atoms, scaled by the number of
// physical atoms each sample point represents. Neighbour search is binned
// at the potential range so the cost is near linear in the cloud size.
inline std::vector<double> density_shifts(const std::vector<Vec3>& cloud,
                                          const potentials::PotentialCurve& curve,
                                          double atoms_per_sample) {
  double range = curve.r.empty() ? 0.0 : curve.r.back();
  std::vector<double> shift(cloud.size(), 0.0);
  if (range <= 0.0 || cloud.size() < 2) return shift;

  auto cell_of = [&](const Vec3& p) {
    auto c = [&](double x) {
      return static_cast<long long>(std::floor(x / range));
    };
    return std::array<long long, 3>{c(p[0]), c(p[1]), c(p[2])};
  };
  auto key = [](const std::array<long long, 3>& c) {
    return (static_cast<std::uint64_t>(c[0] + (1 << 20)) << 42) ^
           (static_cast<std::uint64_t>(c[1] + (1 << 20)) << 21) ^
           static_cast<std::uint64_t>(c[2] + (1 << 20));
  };
  std::unordered_map<std::uint64_t, std::vector<int>> bins;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    bins[key(cell_of(cloud[i]))].push_back(static_cast<int>(i));

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    auto c = cell_of(cloud[i]);
    double s = 0.0;
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy)
        for (long long dz = -1; dz <= 1; ++dz) {
          auto it = bins.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
          if (it == bins.end()) continue;
          for (int j : it->second) {
            if (static_cast<std::size_t>(j) == i) continue;
            double ddx = cloud[i][0] - cloud[j][0];
            double ddy = cloud[i][1] - cloud[j][1];
            double ddz = cloud[i][2] - cloud[j][2];
            double d = std::sqrt(ddx * ddx + ddy * ddy + ddz * ddz);
            if (d <= range) s += curve.value(d);
          }
        }
    shift[i] = s * atoms_per_sample;
  }
  return shift;
}

// excitation weight of one cloud atom (unnormalized)
inline double excitation_weight(const Vec3& pos, double shift_hz,
                                const BeamSpec& beam) {
  return beam.intensity(pos) * beam.line_shape(shift_hz);
}

// How the density-induced line shift at a candidate atom is evaluated.
// MEAN_FIELD uses the analytic cloud density times the volume integral of
// the potential; PAIRWISE is the literal sum over the other sampled atoms.
// The pairwise estimator carries shot noise of sqrt(scale * rho * int V^2)
// where scale is the number of physical atoms per sample point; at a 400x
// subsampled cloud that is ~25 MHz against a ~1 MHz line width, which
// washes out the detuning selection, so MEAN_FIELD is the default.
enum class ShiftMode { MEAN_FIELD, PAIRWISE };

// volume integral of the curve, Hz m^3 (the per-atom shift coefficient)
inline double curve_volume_integral(const potentials::PotentialCurve& c) {
  double s = 0.0;
  for (std::size_t i = 1; i < c.r.size(); ++i) {
    double fa = c.v[i - 1] * c.r[i - 1] * c.r[i - 1];
    double fb = c.v[i] * c.r[i] * c.r[i];
    s += 0.5 * (fa + fb) * (c.r[i] - c.r[i - 1]);
  }
  return 4.0 * cn::pi * s;
}

struct PhysicalSamplerSpec {
  int cloud_size = 10000;       // sampled point atoms per excitation
  int calibration_draws = 2000;  // positions used for the Gaussian width fit
  int draws_per_cloud = 8;       // calibration draws share clouds for speed
  ShiftMode shift_mode = ShiftMode::MEAN_FIELD;
};

struct PhysicalSampleResult {
  std::vector<Vec3> positions;  // n_exc excitation sites
  Vec3 sigma{0.0, 0.0, 0.0};    // fitted Gaussian widths from calibration
};

namespace detail {

// one weighted draw over a cloud; returns the chosen index
inline int draw_weighted(const std::vector<double>& w, std::mt19937_64& eng) {
  double total = 0.0;
  for (double x : w) total += x;
  if (!(total > 0.0))
    throw NumericalError(
        "physical sampler: every cloud atom has zero excitation weight "
        "(empty acceptance region; detuning incompatible with the cloud "
        "densities)");
  double u = rng::uniform01(eng) * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(w.size()) - 1;
}

}  // namespace detail

// Appendix-style physical sampler: for each excitation draw a fresh cloud,
// weight every atom by laser intensity times the detuning line shape at its
// density-induced shift, and pick one. A separate calibration ensemble fits
// Gaussian widths to the same weighted distribution.
inline PhysicalSampleResult sample_positions_physical(
    const CloudSpec& cloud_spec, const BeamSpec& beam,
    const potentials::PotentialCurve& curve, int n_exc, std::uint64_t seed,
    const PhysicalSamplerSpec& spec = {}) {
  cloud_spec.validate();
  beam.validate();
  if (n_exc < 1) throw ConfigError("physical sampler: n_exc must be >= 1");
  if (spec.cloud_size < 2)
    throw ConfigError("physical sampler: cloud_size must be >= 2");
  double scale = cloud_spec.atom_count / spec.cloud_size;
  double kappa = curve_volume_integral(curve);

  auto weights_of = [&](const std::vector<Vec3>& cloud) {
    std::vector<double> w(cloud.size());
    if (spec.shift_mode == ShiftMode::PAIRWISE) {
      auto shifts = density_shifts(cloud, curve, scale);
      for (std::size_t i = 0; i < cloud.size(); ++i)
        w[i] = excitation_weight(cloud[i], shifts[i], beam);
    } else {
      for (std::size_t i = 0; i < cloud.size(); ++i)
        w[i] = excitation_weight(cloud[i],
                                 kappa * cloud_spec.density(cloud[i]), beam);
    }
    return w;
  };

  PhysicalSampleResult out;
  for (int n = 0; n < n_exc; ++n) {
    auto eng = rng::make_engine(seed, "positions", n);
    auto cloud = sample_cloud_atoms(cloud_spec, spec.cloud_size, eng);
    auto w = weights_of(cloud);
    out.positions.push_back(cloud[detail::draw_weighted(w, eng)]);
  }

  if (spec.calibration_draws > 0) {
    std::array<double, 3> m1{0, 0, 0}, m2{0, 0, 0};
    int done = 0;
    for (int c = 0; done < spec.calibration_draws; ++c) {
      auto eng = rng::make_engine(seed, "calibration", c);
      auto cloud = sample_cloud_atoms(cloud_spec, spec.cloud_size, eng);
      auto w = weights_of(cloud);
      for (int d = 0; d < spec.draws_per_cloud && done < spec.calibration_draws;
           ++d, ++done) {
        const Vec3& p = cloud[detail::draw_weighted(w, eng)];
        for (int a = 0; a < 3; ++a) {
          m1[a] += p[a];
          m2[a] += p[a] * p[a];
        }
      }
    }
    for (int a = 0; a < 3; ++a) {
      double mean = m1[a] / done;
      out.sigma[a] = std::sqrt(std::max(0.0, m2[a] / done - mean * mean));
    }
  }
  return out;
}

// Simplified model: i.i.d. Gaussian positions per axis. By the single-
// impurity convention the n_exc = 1 case pins the position to the origin;
// pass force_origin = false to get a genuine single draw.
inline std::vector<Vec3> sample_positions_gaussian(const Vec3& sigma,
                                                   int n_exc,
                                                   std::uint64_t seed,
                                                   bool force_origin = true) {
  if (n_exc < 1) throw ConfigError("gaussian sampler: n_exc must be >= 1");
  for (double s : sigma)
    if (s < 0.0) throw ConfigError("gaussian sampler: sigma must be >= 0");
  if (n_exc == 1 && force_origin) return {Vec3{0.0, 0.0, 0.0}};
  auto eng = rng::make_engine(seed, "positions");
  std::vector<Vec3> out(n_exc);
  for (auto& p : out)
    for (int a = 0; a < 3; ++a) p[a] = sigma[a] * rng::normal01(eng);
  return out;
}

}  // namespace awia::excitation
