// acceptance suite: end-to-end physics checks, one pass/fail line each.
//
// Run without arguments for the full suite, or pass criterion numbers to
// run a subset (e.g. ./acceptance 3 12). Exit code is the failure count.
//
// Several checks run at deliberately reduced scale so the whole suite fits
// a single core in tens of minutes; every reduction is stated in the
// printed detail line and in README.md.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "awia/analysis.hpp"
#include "awia/constants.hpp"
#include "awia/errors.hpp"
#include "awia/excitation.hpp"
#include "awia/field.hpp"
#include "awia/grid.hpp"
#include "awia/potentials.hpp"
#include "awia/rasterize.hpp"
#include "awia/rng.hpp"
#include "awia/rydberg.hpp"
#include "awia/scattering.hpp"
#include "awia/sequence.hpp"
#include "awia/snapshot.hpp"
#include "awia/solver3d.hpp"
#include "awia/solver_radial.hpp"
#include "awia/sp_wave.hpp"
#include "awia/twa.hpp"

using namespace awia;
using namespace awia::solver;
namespace cn = awia::constants;

#ifndef AWIA_REPO_DIR
#define AWIA_REPO_DIR "."
#endif

namespace {

constexpr double rho0 = 4.0e20;  // m^-3

double u0_rb() {
  return 4.0 * cn::pi * cn::hbar * cn::hbar * cn::a_bg_rb87 / cn::m_rb87;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---- cached potential curves ----

scattering::ScatteringData& scat() {
  static auto s = scattering::ScatteringData::from_files(
      std::string(AWIA_REPO_DIR) + "/data/phase_shifts_s.txt",
      std::string(AWIA_REPO_DIR) + "/data/phase_shifts_p.txt");
  return s;
}

rydberg::RydbergState state_133s() {
  return rydberg::RydbergState{133, 0, 3.1311804};
}

const potentials::PotentialCurve& s_curve_raw() {
  static auto c = [] {
    auto st = state_133s();
    return potentials::s_wave_potential(st, rydberg::numerov_radial(st),
                                        scat());
  }();
  return c;
}

potentials::PotentialCurve s_curve(double cutoff_hz) {
  if (std::isinf(cutoff_hz)) return s_curve_raw();
  return potentials::apply_cutoff(s_curve_raw(), cutoff_hz);
}

potentials::PotentialCurve casw_curve(double cutoff_hz) {
  static auto c = [] {
    auto st = state_133s();
    double r_min = potentials::shape_resonance_radius(
        st, potentials::shape_resonance_energy);
    return potentials::casw_potential(st, rydberg::numerov_radial(st), scat(),
                                      r_min);
  }();
  return potentials::apply_cutoff(c, cutoff_hz);
}

potentials::PotentialCurve sp_curve(double cutoff_hz) {
  static auto c = [] {
    return potentials::sp_wave_potential(state_133s(), scat());
  }();
  return potentials::apply_cutoff(c, cutoff_hz);
}

// ---- run helpers ----

excitation::ExcitationSchedule single_pulse() {
  excitation::ExcitationSchedule s;
  s.n_exc = 1;
  s.t_exc = 0.5e-6;
  s.t_imp = 3.5e-6;
  s.t_ion = 0.8e-6;
  s.positions = {excitation::Vec3{0.0, 0.0, 0.0}};
  return s;
}

struct RadialRun {
  RadialGrid grid;
  std::vector<double> times;
  std::vector<std::vector<double>> rho;  // density per observer time
  bool boundary = false;
};

RadialRun radial_run(const potentials::PotentialCurve& curve, int n,
                     double r_max, excitation::ExcitationSchedule sched,
                     double t_final, const std::vector<double>& obs) {
  RadialRun out;
  out.grid = RadialGrid{n, r_max / n};
  auto v = sample_curve(curve, out.grid);
  double vmax = 0.0;
  for (double x : v) vmax = std::max(vmax, std::abs(x));
  SequenceSpec spec;
  spec.schedule = std::move(sched);
  spec.t_final = t_final;
  spec.observer_times = obs;
  spec.plan.dt = StepPlan::max_dt_for(vmax);
  spec.plan.dt_free = 1e-8;
  auto f = homogeneous_radial_field(out.grid, rho0, u0_rb());
  SolverRadial sv(out.grid, u0_rb());
  run_sequence_radial(sv, f, v, spec, [&](const RadialField& x) {
    out.times.push_back(x.time);
    out.rho.push_back(x.density());
  });
  out.boundary = sv.boundary_warning();
  return out;
}

// reference S-wave run shared by the focusing and potential-detail checks:
// 133s curve cut at 170 MHz, n = 8192 over 6 um, observers out to 100 us
const std::vector<double>& late_obs() {
  static std::vector<double> t = {4e-6,   10e-6,  20e-6,  30e-6,  40e-6,
                                  50e-6,  60e-6,  70e-6,  80e-6,  90e-6,
                                  100e-6, 120e-6, 140e-6, 160e-6, 180e-6,
                                  200e-6, 231e-6};
  return t;
}

const RadialRun& s_reference_run() {
  static RadialRun r =
      radial_run(s_curve(170e6), 8192, 6e-6, single_pulse(), 231e-6,
                 late_obs());
  return r;
}

// Gaussian smoothing of a spherically symmetric density, evaluated at
// radius x: the exact spherical convolution of the deviation from rho0.
double smoothed_density(const RadialGrid& g, const std::vector<double>& rho,
                        double sigma, double x) {
  double s = 0.0;
  for (int i = 0; i < g.n; ++i) {
    double rp = g.r(i);
    double em = std::exp(-(x - rp) * (x - rp) / (2.0 * sigma * sigma));
    double ep = std::exp(-(x + rp) * (x + rp) / (2.0 * sigma * sigma));
    s += rp * (rho[i] - rho0) * (em - ep) * g.dr;
  }
  return rho0 + s / (x * std::sqrt(2.0 * cn::pi) * sigma);
}

double mean_density(const RadialRun& run, std::size_t ti, double r_lo,
                    double r_hi) {
  double s = 0.0;
  long n = 0;
  for (int i = 0; i < run.grid.n; ++i) {
    double r = run.grid.r(i);
    if (r < r_lo || r > r_hi) continue;
    s += run.rho[ti][i];
    ++n;
  }
  return s / static_cast<double>(n);
}

struct Result {
  bool pass = false;
  std::string detail;
};

// ---- criteria ----

// 1. atom-number and energy conservation, 3D and radial
Result c1_conservation() {
  double u0 = u0_rb();
  auto curve = s_curve(170e6);
  double dt = StepPlan::max_dt_for(170e6);

  Lattice3 g3{{64, 64, 64}, {6e-6 / 64, 6e-6 / 64, 6e-6 / 64}};
  auto imp = potentials::rasterize(curve, g3, {0.0, 0.0, 0.0}, true);
  Solver3d sv3(g3, TrapSpec{}, u0);
  auto f3 = homogeneous_field(g3, rho0, u0);
  double n0 = f3.atom_count();
  double e0 = sv3.energy(f3, &imp, 1.0);
  for (int s = 0; s < 1000; ++s) sv3.step(f3, dt, &imp, 1.0);
  double dn3 = std::abs(f3.atom_count() - n0) / n0;
  double de3 = std::abs(sv3.energy(f3, &imp, 1.0) - e0) / std::abs(e0);

  RadialGrid gr{8192, 6e-6 / 8192};
  auto v = sample_curve(curve, gr);
  auto fr = homogeneous_radial_field(gr, rho0, u0);
  for (int i = 0; i < gr.n; ++i) {
    double r = gr.r(i);
    double amp = std::sqrt(rho0 * (1.0 + 0.05 * std::exp(-(r * r) / 0.16e-12)));
    fr.ut[i] = r * (amp - std::sqrt(rho0));
  }
  SolverRadial svr(gr, u0);
  double nr0 = fr.norm_integral();
  double er0 = svr.energy(fr, v, 1.0);
  for (int s = 0; s < 1000; ++s) svr.step(fr, dt, v, 1.0);
  double dnr = std::abs(fr.norm_integral() - nr0) / nr0;
  double der = std::abs(svr.energy(fr, v, 1.0) - er0) / std::abs(er0);

  bool pass = dn3 <= 1e-8 && de3 <= 1e-6 && dnr <= 1e-8 && der <= 1e-6;
  return {pass, fmt("3D dN/N=%.1e dE/E=%.1e, radial dN/N=%.1e dE/E=%.1e "
                    "(1000 steps, 64^3 and 8192)",
                    dn3, de3, dnr, der)};
}

// 2. radial vs 3D agreement on a spherical problem, V=0 and V=S-wave
Result c2_radial_vs_3d() {
  double u0 = u0_rb();
  int n3 = 48;
  double box = 6e-6;
  Lattice3 g3{{n3, n3, n3}, {box / n3, box / n3, box / n3}};
  RadialGrid gr{512, 3e-6 / 512};

  auto compare = [&](const LatticeField& f3, const RadialField& fr) {
    auto rho_r = fr.density();
    double worst = 0.0;
    for (int i = 1; i < n3 / 2 - 4; ++i) {  // along +x, away from the corner
      double x = g3.coord(0, n3 / 2 + i);
      if (x > 2.5e-6) break;
      double q = x / gr.dr - 0.5;
      int b = static_cast<int>(q);
      double fr_d = rho_r[b] + (q - b) * (rho_r[b + 1] - rho_r[b]);
      double d3 = std::norm(f3.psi[g3.index(n3 / 2 + i, n3 / 2, n3 / 2)]);
      worst = std::max(worst, std::abs(d3 - fr_d) / rho0);
    }
    return worst;
  };

  // free relaxation of a 5% Gaussian bump over 10 us
  double a = 0.05, w = 0.5e-6;
  auto f3 = homogeneous_field(g3, rho0, u0);
  for (int i = 0; i < n3; ++i)
    for (int j = 0; j < n3; ++j)
      for (int k = 0; k < n3; ++k) {
        double x = g3.coord(0, i), y = g3.coord(1, j), z = g3.coord(2, k);
        double r2 = x * x + y * y + z * z;
        f3.psi[g3.index(i, j, k)] =
            std::sqrt(rho0 * (1.0 + a * std::exp(-r2 / (w * w))));
      }
  auto fr = homogeneous_radial_field(gr, rho0, u0);
  for (int i = 0; i < gr.n; ++i) {
    double r = gr.r(i);
    fr.ut[i] = r * (std::sqrt(rho0 * (1.0 + a * std::exp(-(r * r) / (w * w)))) -
                    std::sqrt(rho0));
  }
  Solver3d sv3(g3, TrapSpec{}, u0);
  SolverRadial svr(gr, u0);
  for (int s = 0; s < 1000; ++s) sv3.step(f3, 1e-8);
  for (int s = 0; s < 1000; ++s) svr.step(fr, 1e-8);
  double worst_free = compare(f3, fr);

  // The impurity case: 133s curve cut at 2 MHz, one short pulse. The pulse
  // launches waves at the healing length, which the 125 nm 3D grid cannot
  // carry, so both densities are compared after 0.3 um Gaussian smoothing
  // (for the radial profile via the exact spherical convolution).
  auto curve = s_curve(2e6);
  auto sched = single_pulse();
  sched.t_exc = 0.3e-6;
  sched.t_imp = 0.8e-6;  // 0.5 us imprint
  SequenceSpec spec;
  spec.schedule = sched;
  spec.t_final = 10e-6;
  spec.observer_times = {};
  spec.plan.dt = StepPlan::max_dt_for(2e6);
  spec.plan.dt_free = 1e-8;
  auto f3v = homogeneous_field(g3, rho0, u0);
  Solver3d sv3v(g3, TrapSpec{}, u0);
  run_sequence(sv3v, f3v, curve, spec);
  auto frv = homogeneous_radial_field(gr, rho0, u0);
  SolverRadial svrv(gr, u0);
  auto v = sample_curve(curve, gr);
  run_sequence_radial(svrv, frv, v, spec);

  double sig = 0.3e-6;
  analysis::SmoothingKernel k3d{sig, 5.0};
  auto rho3s = analysis::smooth(f3v.density(), g3, k3d);
  auto rho_r = frv.density();
  auto radial_smoothed = [&](double x) {
    // spherical Gaussian convolution of the deviation from rho0
    double s = 0.0;
    for (int i = 0; i < gr.n; ++i) {
      double rp = gr.r(i);
      double em = std::exp(-(x - rp) * (x - rp) / (2.0 * sig * sig));
      double ep = std::exp(-(x + rp) * (x + rp) / (2.0 * sig * sig));
      s += rp * (rho_r[i] - rho0) * (em - ep) * gr.dr;
    }
    return rho0 + s / (x * std::sqrt(2.0 * cn::pi) * sig);
  };
  double worst_v = 0.0;
  for (int i = 1; i < n3 / 2 - 4; ++i) {
    double x = g3.coord(0, n3 / 2 + i);
    if (x > 2.0e-6) break;
    double d3 = rho3s[g3.index(n3 / 2 + i, n3 / 2, n3 / 2)];
    worst_v = std::max(worst_v, std::abs(d3 - radial_smoothed(x)) / rho0);
  }

  bool pass = worst_free <= 0.02 && worst_v <= 0.02;
  return {pass, fmt("max |rho_3D - rho_radial|/rho0: %.2e free (pointwise), "
                    "%.2e with V (0.3 um smoothed; 48^3 vs 512-point "
                    "radial, 10 us)",
                    worst_free, worst_v)};
}

// 3. healing length and chemical potential
Result c3_healing_length() {
  double u0 = u0_rb();
  double mu = u0 * rho0;
  double xi = cn::hbar / std::sqrt(2.0 * cn::m_rb87 * mu);
  double mu_expect = 4.0 * cn::pi * cn::hbar * cn::hbar *
                     (109.0 * cn::bohr_radius) / cn::m_rb87 * rho0;
  bool pass = std::abs(xi - 0.13e-6) <= 0.05 * 0.13e-6 &&
              std::abs(mu - mu_expect) <= 1e-12 * mu_expect;
  return {pass, fmt("xi = %.4f um (target 0.13 +-5%%), mu = U0 rho0 = "
                    "%.3e J = h x %.2f kHz",
                    xi * 1e6, mu, mu / cn::h_planck / 1e3)};
}

// 4. outer-well density response at the end of the imprint
Result c4_outer_well() {
  auto run = radial_run(s_curve(170e6), 8192, 3e-6, single_pulse(), 4e-6,
                        {4e-6});
  // outermost potential well of the 133s curve sits near 1.6-1.7 um
  double best = 0.0, best_r = 0.0;
  for (int i = 0; i < run.grid.n; ++i) {
    double r = run.grid.r(i);
    if (r < 1.4e-6 || r > 1.85e-6) continue;
    double rel = run.rho[0][i] / rho0 - 1.0;
    if (rel > best) {
      best = rel;
      best_r = r;
    }
  }
  bool pass = std::abs(best - 0.13) <= 0.04;
  return {pass, fmt("outer-well density increase %.1f%% at r = %.2f um, "
                    "t = 4 us (target 13 +-4)",
                    best * 100.0, best_r * 1e6)};
}

// 5. late-time focusing near the core and non-monotone central density
Result c5_focusing() {
  const auto& run = s_reference_run();
  std::size_t t100 =
      std::find(run.times.begin(), run.times.end(), 100e-6) -
      run.times.begin();
  double peak = 0.0;
  for (int i = 0; i < run.grid.n; ++i) {
    double r = run.grid.r(i);
    if (r > 0.75e-6) break;
    peak = std::max(peak, run.rho[t100][i] / rho0 - 1.0);
  }
  // the smoothed central density first grows (inflow) and later decays
  // (outflow), so the series must change direction at least once
  std::vector<double> central;
  std::string series;
  for (std::size_t t = 0; t < run.times.size(); ++t) {
    central.push_back(
        smoothed_density(run.grid, run.rho[t], 0.5e-6, 0.2e-6) / rho0 - 1.0);
    series += fmt("%s%.3f", t ? " " : "", central.back());
  }
  bool rises = false, falls = false;
  for (std::size_t t = 1; t < central.size(); ++t) {
    if (central[t] > central[t - 1]) rises = true;
    if (central[t] < central[t - 1]) falls = true;
  }
  bool pass = std::abs(peak - 2.5) <= 0.6 && rises && falls;
  return {pass, fmt("max drho/rho0 = %.2f near core at 100 us (target 2.5 "
                    "+-0.6); smoothed central series at 4..231 us: [%s] "
                    "(non-monotone: %s)",
                    peak, series.c_str(),
                    rises && falls ? "yes" : "no")};
}

// 6. late-time cutoff independence
Result c6_cutoff_independence() {
  std::vector<double> cuts = {85e6, 170e6, 340e6,
                              std::numeric_limits<double>::infinity()};
  std::vector<RadialRun> runs;
  for (double c : cuts)
    runs.push_back(radial_run(s_curve(c), 4096, 6e-6, single_pulse(), 231e-6,
                              {4e-6, 231e-6}));
  // early: strong disagreement inside the orbit (region I)
  double early = 0.0;
  for (int i = 0; i < runs[0].grid.n; ++i) {
    double r = runs[0].grid.r(i);
    if (r > 1.0e-6) break;
    early = std::max(early,
                     std::abs(runs[0].rho[0][i] - runs[3].rho[0][i]) / rho0);
  }
  // late: outside the orbit (region II, 2-4 um) all four agree
  double late = 0.0;
  for (std::size_t a = 0; a < runs.size(); ++a)
    for (std::size_t b = a + 1; b < runs.size(); ++b)
      for (int i = 0; i < runs[0].grid.n; ++i) {
        double r = runs[0].grid.r(i);
        if (r < 2.0e-6 || r > 4.0e-6) continue;
        late = std::max(late,
                        std::abs(runs[a].rho[1][i] - runs[b].rho[1][i]) / rho0);
      }
  bool pass = early > 0.2 && late <= 0.10;
  return {pass, fmt("region-I deviation %.2f rho0 at 4 us (cutoffs differ); "
                    "region-II worst pairwise deviation %.3f rho0 at 231 us "
                    "(<= 0.10; cutoffs 85/170/340/uncut MHz)",
                    early, late)};
}

// 7. potential-detail insensitivity at 100 us. Configuration mirrors the
// production comparison: S and CASW uncut, S+P cut at 1 MHz (only the
// attractive divergence is clipped; the repulsive barriers stay).
Result c7_potential_detail() {
  double inf = std::numeric_limits<double>::infinity();
  auto run_s = radial_run(s_curve(inf), 8192, 6e-6, single_pulse(), 100e-6,
                          {100e-6});
  auto run_c = radial_run(casw_curve(inf), 8192, 6e-6, single_pulse(),
                          100e-6, {100e-6});
  auto run_p = radial_run(sp_curve(1e6), 8192, 6e-6, single_pulse(), 100e-6,
                          {100e-6});
  // smoothed central response: mean of the 0.5 um smoothed deviation over
  // r < 1 um
  auto resp = [](const RadialRun& run) {
    double s = 0.0;
    int n = 0;
    for (double x = 0.05e-6; x <= 1.0e-6; x += 0.05e-6, ++n)
      s += smoothed_density(run.grid, run.rho[0], 0.5e-6, x) / rho0 - 1.0;
    return s / n;
  };
  double r_s = resp(run_s), r_c = resp(run_c), r_p = resp(run_p);
  double sp_over_s = r_p / r_s;
  double s_over_casw = r_s / r_c;
  // outside the orbit the three responses must agree qualitatively
  double out_sc = 0.0, out_sp = 0.0;
  for (int i = 0; i < run_s.grid.n; ++i) {
    double r = run_s.grid.r(i);
    if (r < 2.0e-6 || r > 4.0e-6) continue;
    out_sc = std::max(out_sc, std::abs(run_s.rho[0][i] - run_c.rho[0][i]) / rho0);
    out_sp = std::max(out_sp, std::abs(run_s.rho[0][i] - run_p.rho[0][i]) / rho0);
  }
  bool ratios_ok = std::abs(sp_over_s - 1.5) <= 0.5 &&
                   std::abs(s_over_casw - 1.5) <= 0.5;
  bool outer_ok = out_sc <= 0.05;
  bool pass = ratios_ok && outer_ok;
  std::string note;
  if (!ratios_ok)
    note = "; KNOWN GAP: with the bundled model p-wave phase shifts the "
           "resonance well integrates ~10x stronger than S, and the "
           "reflective 6 um box recycles its ejecta (ratio persists at "
           "12 um), so the production SP/S = 1.5 is not reproduced; S and "
           "CASW band-integrated strengths match within 5%, which forces "
           "S/CASW = 1.0";
  return {pass, fmt("smoothed central response at 100 us: SP/S = %.2f, "
                    "S/CASW = %.2f (targets 1.5 +-0.5; responses "
                    "%.4f/%.4f/%.4f); outer-region S-CASW deviation %.3f "
                    "rho0 (<= 0.05), S-SP %.3f%s",
                    sp_over_s, s_over_casw, r_p, r_s, r_c, out_sc, out_sp,
                    note.c_str())};
}

// 8. contrast grows with the number of excitations
Result c8_contrast_growth() {
  double u0 = u0_rb();
  Lattice3 g{{64, 64, 64}, {6e-6 / 64, 6e-6 / 64, 6e-6 / 64}};
  auto curve = s_curve(5e6);  // the 64^3 grid cannot resolve deeper wells
  auto positions = excitation::sample_positions_gaussian(
      {1e-6, 2e-6, 1e-6}, 20, 17, false);
  // the box is periodic and only 6 um wide, so fold stray draws back in
  for (auto& p : positions)
    for (auto& x : p) x = std::clamp(std::remainder(x, 6e-6), -2.9e-6, 2.9e-6);
  analysis::SmoothingKernel kernel;  // sigma 0.5 um
  double back = rho0 * 6e-6;  // homogeneous column reference

  std::vector<int> n_excs = {1, 5, 10, 20};
  std::vector<double> chi;
  for (int n_exc : n_excs) {
    excitation::ExcitationSchedule sched = single_pulse();
    sched.n_exc = n_exc;
    sched.positions.assign(positions.begin(), positions.begin() + n_exc);
    SequenceSpec spec;
    spec.schedule = sched;
    spec.t_final = 116e-6;
    spec.observer_times = {100e-6, 108e-6, 116e-6};
    spec.plan.dt = StepPlan::max_dt_for(5e6);
    spec.plan.dt_free = 1e-8;
    spec.cell_average = true;
    auto f = homogeneous_field(g, rho0, u0);
    Solver3d sv(g, TrapSpec{}, u0);
    double best = 0.0;
    run_sequence(sv, f, curve, spec, [&](const LatticeField& x) {
      auto col = analysis::column_density(
          analysis::smooth(x.density(), g, kernel), g);
      for (auto& v : col.v) v = (v - back) / back;
      best = std::max(best, analysis::contrast(col, back, x.time).chi_c);
    });
    chi.push_back(best);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < chi.size(); ++i)
    if (chi[i] <= chi[i - 1]) monotone = false;
  // least-squares line chi = a + b n
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < chi.size(); ++i) {
    double x = n_excs[i], y = chi[i];
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
  }
  double n = static_cast<double>(chi.size());
  double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double a = (sy - b * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < chi.size(); ++i) {
    double y = chi[i];
    ss_res += (y - a - b * n_excs[i]) * (y - a - b * n_excs[i]);
    ss_tot += (y - sy / n) * (y - sy / n);
  }
  double r2 = 1.0 - ss_res / ss_tot;
  bool pass = monotone && r2 > 0.9;
  return {pass, fmt("chi_c = %.4f/%.4f/%.4f/%.4f for N_exc = 1/5/10/20 "
                    "(monotone: %s), linear fit R^2 = %.3f (> 0.9); reduced "
                    "scale: one position sample, 5 MHz cutoff",
                    chi[0], chi[1], chi[2], chi[3], monotone ? "yes" : "no",
                    r2)};
}

// shared ensemble for criteria 9 and 10: single excitation at the origin on
// 32^3, 20 MHz cutoff, 64 trajectories, observers at 0 and 4 us
struct EnsembleBundle {
  Lattice3 grid{{32, 32, 32}, {6e-6 / 32, 6e-6 / 32, 6e-6 / 32}};
  twa::BogoliubovModeSet modes;
  std::vector<twa::WignerObservables> obs;
  LatticeField gpe_final;     // deterministic run, same schedule
  LatticeField gpe_initial;
  std::vector<double> times = {0.0, 2e-6, 4e-6};
};

SequenceSpec bundle_spec(const std::vector<double>& times) {
  SequenceSpec spec;
  spec.schedule = single_pulse();
  spec.t_final = 4e-6;
  spec.observer_times = times;
  spec.plan.dt = StepPlan::max_dt_for(2e6);
  spec.plan.dt_free = 1e-8;
  spec.cell_average = true;
  return spec;
}

// S+P curve clipped symmetrically at 2 MHz: the attractive divergence is
// the usual cutoff; the narrow repulsive barriers are sub-nm features the
// cell-averaged 0.19 um lattice cannot carry, and leaving them in would
// only force a 1000x smaller time step.
potentials::PotentialCurve bundle_curve() {
  auto curve = sp_curve(2e6);
  for (auto& v : curve.v) v = std::min(v, 2e6);
  return curve;
}

const EnsembleBundle& ensemble_bundle() {
  static EnsembleBundle b = [] {
    EnsembleBundle e;
    double u0 = u0_rb();
    e.modes = twa::bogoliubov_modes(e.grid, rho0, u0);
    auto curve = bundle_curve();
    twa::EnsembleSpec es;
    es.n_traj = 128;
    es.base_seed = 4242;
    e.obs = twa::run_ensemble(
        es, e.modes, rho0, e.times.size(),
        [&](int, LatticeField& f, const auto& observe) {
          Solver3d sv(e.grid, TrapSpec{}, u0_rb());
          run_sequence(sv, f, curve, bundle_spec(e.times), observe);
        });
    auto f = homogeneous_field(e.grid, rho0, u0);
    Solver3d sv(e.grid, TrapSpec{}, u0);
    run_sequence(sv, f, curve, bundle_spec(e.times),
                 [&](const LatticeField& x) {
                   if (x.time == 0.0) e.gpe_initial = x;
                   if (x.time == 4e-6) e.gpe_final = x;
                 });
    return e;
  }();
  return b;
}

// 9. stochastic-ensemble statistics
Result c9_twa_statistics() {
  double u0 = u0_rb();
  Lattice3 g{{32, 32, 32}, {6e-6 / 32, 6e-6 / 32, 6e-6 / 32}};
  auto modes = twa::bogoliubov_modes(g, rho0, u0);

  // (a) initial depletion vs the Bogoliubov sum, 3 standard errors
  double want = 0.0;
  for (double v : modes.v) want += v * v;
  const int n_dep = 128;
  double s1 = 0.0, s2 = 0.0;
  for (int t = 0; t < n_dep; ++t) {
    auto f = twa::wigner_initial_state(modes, rho0, 7, t);
    double nu = f.atom_count() - rho0 * g.volume() -
                0.5 * modes.delta_c() * g.volume();
    s1 += nu;
    s2 += nu * nu;
  }
  double mean = s1 / n_dep;
  double se = std::sqrt((s2 / n_dep - mean * mean) / (n_dep - 1));
  bool dep_ok = std::abs(mean - want) <= 3.0 * se;

  // (b) the density split identity is exact
  const auto& bundle = ensemble_bundle();
  bool ident_ok = true;
  for (const auto& o : bundle.obs)
    for (std::size_t i = 0; i < o.rho_t.size(); ++i)
      if (o.rho_t[i] != o.rho_c[i] + o.rho_u[i]) ident_ok = false;

  // (c) standard error falls as 1/sqrt(N_traj)
  twa::EnsembleSpec es40, es400;
  es40.n_traj = 40;
  es400.n_traj = 400;
  es40.base_seed = es400.base_seed = 33;
  auto run0 = [&](const twa::EnsembleSpec& es) {
    auto out = twa::run_ensemble(es, modes, rho0, 1,
                                 [&](int, LatticeField& f, const auto& ob) {
                                   ob(f);
                                 });
    double s = 0.0;
    for (double x : out[0].se_rho_t) s += x;
    return s / static_cast<double>(out[0].se_rho_t.size());
  };
  double ratio = run0(es40) / run0(es400);
  bool scale_ok = std::abs(ratio - std::sqrt(10.0)) <= 0.2 * std::sqrt(10.0);

  // (d) heating stays near the excitation: share of the added uncondensed
  // atoms within 2 um of the (origin-centred) impurity after one pulse
  const auto& o0 = bundle.obs.front();
  const auto& o1 = bundle.obs.back();
  double dv = bundle.grid.cell_volume();
  double dn_tot = 0.0, dn_near = 0.0;
  std::size_t idx = 0;
  for (int i = 0; i < bundle.grid.n[0]; ++i)
    for (int j = 0; j < bundle.grid.n[1]; ++j)
      for (int k = 0; k < bundle.grid.n[2]; ++k, ++idx) {
        double x = bundle.grid.coord(0, i), y = bundle.grid.coord(1, j),
               z = bundle.grid.coord(2, k);
        double d = (o1.rho_u[idx] - o0.rho_u[idx]) * dv;
        dn_tot += d;
        if (x * x + y * y + z * z < 4e-12) dn_near += d;
      }
  double frac = dn_near / dn_tot;
  bool local_ok = dn_tot > 0.0 && frac >= 0.55 && frac <= 1.15;
  bool mag_ok = dn_tot >= 65.0 / 3.0 && dn_tot <= 65.0 * 3.0;

  bool pass = dep_ok && ident_ok && scale_ok && local_ok && mag_ok;
  return {pass,
          fmt("depletion %.1f vs %.1f atoms (se %.1f) [%s]; split identity "
              "[%s]; se ratio %.2f vs sqrt(10) [%s]; heating: dN_u = %.1f "
              "with %.0f%% inside r < 2 um [%s, magnitude %s] (reduced "
              "scale: 32^3, 128 traj, S+P potential clipped at 2 MHz)",
              mean, want, se, dep_ok ? "ok" : "FAIL",
              ident_ok ? "ok" : "FAIL", ratio, scale_ok ? "ok" : "FAIL",
              dn_tot, frac * 100.0, local_ok ? "ok" : "FAIL",
              mag_ok ? "ok" : "FAIL")};
}

// 10. deterministic and stochastic solvers agree on the mean density
Result c10_gpe_vs_twa() {
  const auto& bundle = ensemble_bundle();
  analysis::SmoothingKernel kernel;  // 0.5 um > 0.1875 um spacing
  const auto& g = bundle.grid;
  double worst = 0.0, worst_err = 0.0;
  std::string detail;
  bool pass = true;
  for (std::size_t t = 0; t < bundle.obs.size(); ++t) {
    const auto& o = bundle.obs[t];
    if (o.time != 0.0 && o.time != 4e-6) continue;
    auto twa_s = analysis::smooth(o.rho_t, g, kernel);
    const LatticeField& ref =
        o.time == 0.0 ? bundle.gpe_initial : bundle.gpe_final;
    auto gpe_s = analysis::smooth(ref.density(), g, kernel);
    auto col_t = analysis::column_density(twa_s, g);
    auto col_g = analysis::column_density(gpe_s, g);
    // fully-correlated error bound for the smoothed central column
    double err = 0.0;
    for (int k = 0; k < g.n[2]; ++k)
      err += o.se_rho_t[g.index(g.n[0] / 2, g.n[1] / 2, k)] * g.d[2];
    double diff = std::abs(col_t.at(g.n[0] / 2, g.n[1] / 2) -
                           col_g.at(g.n[0] / 2, g.n[1] / 2));
    if (diff > 3.0 * err + 1e-4 * rho0 * 6e-6) pass = false;
    if (diff > worst) {
      worst = diff;
      worst_err = err;
    }
  }
  return {pass, fmt("central column |TWA - GPE| worst %.3e m^-2 vs 3 s.e. "
                    "= %.3e m^-2 (+0.01%% systematic allowance)",
                    worst, 3.0 * worst_err)};
}

// 11. three-body loss stays small and nearly Rydberg-independent
Result c11_three_body() {
  double u0 = u0_rb();
  double k3 = 1.8e-41;
  Lattice3 g{{32, 32, 32}, {6e-6 / 32, 6e-6 / 32, 6e-6 / 32}};
  auto curve = s_curve(5e6);
  excitation::ExcitationSchedule sched = single_pulse();
  sched.n_exc = 10;
  sched.positions.assign(10, excitation::Vec3{0.0, 0.0, 0.0});
  SequenceSpec spec;
  spec.schedule = sched;
  spec.t_final = 10 * sched.period();
  spec.observer_times = {};
  spec.plan.dt = StepPlan::max_dt_for(5e6);
  spec.plan.dt_free = 1e-8;
  spec.cell_average = true;

  auto run_loss = [&](bool rydberg_on) {
    auto f = homogeneous_field(g, rho0, u0);
    Solver3d sv(g, TrapSpec{}, u0, k3);
    double n0 = f.atom_count();
    if (rydberg_on) {
      run_sequence(sv, f, curve, spec);
    } else {
      double dt = spec.plan.dt_free;
      while (f.time < spec.t_final - 0.5 * dt) sv.step(f, dt);
    }
    return n0 - f.atom_count();
  };
  double loss_on = run_loss(true);
  double loss_off = run_loss(false);
  double t = spec.t_final;
  double analytic =
      rho0 * g.volume() * (1.0 - 1.0 / std::sqrt(1.0 + 2.0 * k3 * rho0 * rho0 * t));
  double n_total = rho0 * g.volume();
  bool pass = loss_off >= 0.5 * analytic && loss_off <= 2.0 * analytic &&
              loss_on >= 0.5 * analytic && loss_on <= 2.0 * analytic &&
              std::abs(loss_on - loss_off) <= 0.5 * loss_off &&
              loss_on < 1e-3 * n_total;
  return {pass, fmt("loss over 10 pulses (48 us): %.1f on / %.1f off / %.1f "
                    "analytic, of %.0f atoms total",
                    loss_on, loss_off, analytic, n_total)};
}

// 12. excitation-position samplers and the pulse shape
Result c12_samplers() {
  double u0 = u0_rb();
  excitation::CloudSpec cloud;
  cloud.u0 = u0;
  cloud.mu = u0 * rho0;
  cloud.omega_r = 2.0 * cn::pi * 83.0;
  cloud.omega_y = 2.0 * cn::pi * 41.5;
  cloud.atom_count = cloud.tf_atom_count();

  // (a) Kolmogorov-Smirnov test of the y marginal against quadrature
  const int n_samp = 100000;
  auto atoms = excitation::sample_cloud_atoms(cloud, n_samp, 19u);
  std::vector<double> ys;
  ys.reserve(n_samp);
  for (const auto& p : atoms) ys.push_back(p[1]);
  std::sort(ys.begin(), ys.end());
  double ym = cloud.y_max();
  const int nq = 20001;
  std::vector<double> cdf(nq);
  double acc = 0.0;
  for (int i = 0; i < nq; ++i) {
    double y = -ym + 2.0 * ym * i / (nq - 1);
    double w = 1.0 - y * y / (ym * ym);  // marginal density ~ w^2
    double val = w > 0.0 ? w * w : 0.0;
    if (i > 0) acc += val;
    cdf[i] = acc;
  }
  for (auto& x : cdf) x /= acc;
  auto cdf_at = [&](double y) {
    double q = (y + ym) / (2.0 * ym) * (nq - 1);
    int b = std::clamp(static_cast<int>(q), 0, nq - 2);
    return cdf[b] + (q - b) * (cdf[b + 1] - cdf[b]);
  };
  double d_stat = 0.0;
  for (int i = 0; i < n_samp; ++i) {
    double f = cdf_at(ys[i]);
    d_stat = std::max(d_stat, std::abs(f - (i + 1.0) / n_samp));
    d_stat = std::max(d_stat, std::abs(f - static_cast<double>(i) / n_samp));
  }
  double lambda = (std::sqrt((double)n_samp) + 0.12 +
                   0.11 / std::sqrt((double)n_samp)) * d_stat;
  double p_ks = 0.0;
  for (int j = 1; j <= 100; ++j)
    p_ks += 2.0 * ((j % 2) ? 1.0 : -1.0) *
            std::exp(-2.0 * j * j * lambda * lambda);
  p_ks = std::clamp(p_ks, 0.0, 1.0);
  bool ks_ok = p_ks > 0.01;

  // (b) the physics-based position sampler is elongated along the beam
  excitation::BeamSpec beam;
  beam.waist = 20e-6;
  beam.detuning_center =
      excitation::curve_volume_integral(s_curve(170e6)) * cloud.peak_density();
  beam.linewidth = 1e6;
  excitation::PhysicalSamplerSpec ps;
  ps.cloud_size = 4000;
  ps.calibration_draws = 1200;
  auto res = excitation::sample_positions_physical(cloud, beam, s_curve(170e6),
                                                   2, 23u, ps);
  double sx = res.sigma[0], sy = res.sigma[1], sz = res.sigma[2];
  bool aniso_ok = sy > 1.3 * sx && sx / sz > 0.7 && sx / sz < 1.4;

  // (c) pulse shape: periodicity and saturation of the window area
  auto sched = single_pulse();
  sched.n_exc = 3;
  sched.positions.assign(3, excitation::Vec3{0.0, 0.0, 0.0});
  double tau = sched.period();
  bool periodic = true;
  for (double t = 0.0; t < tau; t += 7e-9)
    if (std::abs(excitation::eta(t, sched) -
                 excitation::eta(t + tau, sched)) > 1e-9)
      periodic = false;
  double plateau = excitation::eta_bar(0.5 * (sched.t_exc + sched.t_imp),
                                       sched);
  double area = 0.0, dt = 1e-10;
  for (double t = 0.0; t < tau; t += dt)
    area += excitation::eta_bar(t, sched) * dt;
  bool pulse_ok = periodic && std::abs(plateau - 1.0) < 1e-6 &&
                  std::abs(area - (sched.t_imp - sched.t_exc)) <
                      1e-3 * (sched.t_imp - sched.t_exc);

  bool pass = ks_ok && aniso_ok && pulse_ok;
  return {pass, fmt("KS p = %.3f (> 0.01, 1e5 samples); sampler widths "
                    "(%.2f, %.2f, %.2f) um with sigma_y > sigma_x ~ sigma_z "
                    "[%s]; pulse periodic/saturating [%s]",
                    p_ks, sx * 1e6, sy * 1e6, sz * 1e6,
                    aniso_ok ? "ok" : "FAIL", pulse_ok ? "ok" : "FAIL")};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int num;
    const char* name;
    std::function<Result()> fn;
  };
  std::vector<Criterion> all = {
      {1, "conservation of atom number and energy", c1_conservation},
      {2, "radial and 3D solvers agree", c2_radial_vs_3d},
      {3, "healing length and chemical potential", c3_healing_length},
      {4, "outer-well response at the end of the imprint", c4_outer_well},
      {5, "late-time focusing near the core", c5_focusing},
      {6, "late-time cutoff independence", c6_cutoff_independence},
      {7, "potential-detail insensitivity", c7_potential_detail},
      {8, "contrast grows linearly with excitation number", c8_contrast_growth},
      {9, "stochastic-ensemble statistics", c9_twa_statistics},
      {10, "mean-field and stochastic densities agree", c10_gpe_vs_twa},
      {11, "three-body loss small and Rydberg-independent", c11_three_body},
      {12, "position samplers and pulse shape", c12_samplers},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int failures = 0;
  for (auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.num)) continue;
    auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.fn();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    std::printf("%s %2d  %-48s [%5.1f s]\n      %s\n",
                r.pass ? "PASS" : "FAIL", c.num, c.name, secs,
                r.detail.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failures;
  }
  if (failures) std::printf("%d criteria FAILED\n", failures);
  return failures;
}
