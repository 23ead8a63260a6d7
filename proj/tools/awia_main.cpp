// command-line front end: potential generation, sequence runs with
// resumable checkpoints, stochastic-field ensembles, analysis exports.
//
// exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O error

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "awia/analysis.hpp"
#include "awia/config.hpp"
#include "awia/constants.hpp"
#include "awia/errors.hpp"
#include "awia/excitation.hpp"
#include "awia/field.hpp"
#include "awia/grid.hpp"
#include "awia/manifest.hpp"
#include "awia/potentials.hpp"
#include "awia/rng.hpp"
#include "awia/rydberg.hpp"
#include "awia/scattering.hpp"
#include "awia/sequence.hpp"
#include "awia/snapshot.hpp"
#include "awia/solver3d.hpp"
#include "awia/solver_radial.hpp"
#include "awia/sp_wave.hpp"
#include "awia/twa.hpp"

namespace fs = std::filesystem;
using namespace awia;
namespace cn = awia::constants;

namespace {

const double u0_default =
    4.0 * cn::pi * cn::hbar * cn::hbar * cn::a_bg_rb87 / cn::m_rb87;

struct CliOptions {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;  // overrides the config seed
  int threads = 1;
  // test hook: throw away the run at the first checkpoint at/after this
  // time, leaving the checkpoint behind (emulates a kill mid-run)
  std::optional<double> abort_at;
};

// thrown by the run observer when a test-only abort point is reached
struct AbortRequested {};

int usage() {
  std::cerr
      << "usage: awia <potential|run|ensemble|analyze|verify> [options]\n"
         "  --config PATH   configuration file (required except verify)\n"
         "  --seed N        override the base seed from the config\n"
         "  --threads N     worker threads (currently capped at 1)\n"
         "  --out DIR       output directory (default .)\n";
  return 2;
}

CliOptions parse_options(int argc, char** argv, int first) {
  CliOptions o;
  for (int i = first; i < argc; ++i) {
    std::string a = argv[i];
    auto need = [&](const char* what) -> std::string {
      if (i + 1 >= argc)
        throw ConfigError(std::string(what) + " requires an argument");
      return argv[++i];
    };
    if (a == "--config")
      o.config = need("--config");
    else if (a == "--out")
      o.out = need("--out");
    else if (a == "--seed")
      o.seed = std::stoull(need("--seed"));
    else if (a == "--threads")
      o.threads = std::stoi(need("--threads"));
    else if (a == "--abort-at-us")
      o.abort_at = std::stod(need("--abort-at-us")) * 1e-6;
    else
      throw ConfigError("unknown option: " + a);
  }
  if (o.threads < 1) throw ConfigError("--threads must be >= 1");
  return o;
}

io::Config load_config(const CliOptions& o) {
  if (o.config.empty()) throw ConfigError("--config is required");
  return io::Config::parse_file(o.config);
}

// ---- shared config -> domain plumbing ----

potentials::PotentialCurve make_curve(const io::Config& c) {
  std::string kind = c.get("potential.kind", "s");
  rydberg::RydbergState state;
  state.nu = static_cast<int>(c.get_int("potential.nu", 133));
  state.l = 0;
  state.quantum_defect = c.get_double("potential.defect", 3.1311804);
  auto scat = scattering::ScatteringData::from_files(
      c.get("potential.phase_shifts_s", "data/phase_shifts_s.txt"),
      c.get("potential.phase_shifts_p", "data/phase_shifts_p.txt"));
  potentials::PotentialCurve curve;
  if (kind == "s" || kind == "casw") {
    auto wf = rydberg::numerov_radial(state);
    if (kind == "s") {
      curve = potentials::s_wave_potential(state, wf, scat);
    } else {
      double r_min = c.has("potential.r_min_um")
                         ? c.get_um("potential.r_min_um")
                         : potentials::shape_resonance_radius(
                               state, potentials::shape_resonance_energy);
      curve = potentials::casw_potential(state, wf, scat, r_min);
    }
  } else if (kind == "sp") {
    potentials::SpBasisSpec spec;
    spec.l_max = static_cast<int>(c.get_int("potential.l_max", 2));
    curve = potentials::sp_wave_potential(state, scat, spec);
  } else {
    throw ConfigError("potential.kind must be s, casw or sp");
  }
  double cut = c.has("potential.cutoff_MHz") ? c.get_mhz("potential.cutoff_MHz")
                                             : 170e6;
  if (!std::isinf(cut)) curve = potentials::apply_cutoff(curve, cut);
  return curve;
}

excitation::ExcitationSchedule make_schedule(const io::Config& c,
                                             std::uint64_t seed) {
  excitation::ExcitationSchedule s;
  s.n_exc = static_cast<int>(c.get_int("schedule.n_exc", 1));
  s.t_exc = c.get_us("schedule.t_exc_us");
  s.t_imp = c.get_us("schedule.t_imp_us");
  s.t_ion = c.get_us("schedule.t_ion_us");
  if (c.has("schedule.rise_ns")) s.rise_time = c.get_ns("schedule.rise_ns");
  s.rng_seed = seed;
  return s;
}

void assign_positions(excitation::ExcitationSchedule& s, const io::Config& c,
                      const potentials::PotentialCurve& curve,
                      std::uint64_t seed) {
  std::string sampler = c.get("schedule.sampler", "origin");
  if (sampler == "origin") {
    s.positions.assign(s.n_exc, excitation::Vec3{0.0, 0.0, 0.0});
  } else if (sampler == "gaussian") {
    auto sig = c.get_um_list("schedule.sigma_um");
    if (sig.size() != 3)
      throw ConfigError("schedule.sigma_um needs three values");
    s.positions = excitation::sample_positions_gaussian(
        {sig[0], sig[1], sig[2]}, s.n_exc, seed,
        c.get_bool("schedule.force_origin", true));
  } else if (sampler == "physical") {
    excitation::CloudSpec cloud;
    cloud.u0 = u0_default;
    cloud.mu = cloud.u0 * c.get_double("cloud.peak_per_um3") * 1e18;
    cloud.omega_r = 2.0 * cn::pi * c.get_double("cloud.f_r_hz");
    cloud.omega_y = 2.0 * cn::pi * c.get_double("cloud.f_y_hz");
    cloud.atom_count = c.get_double("cloud.atoms", cloud.tf_atom_count());
    excitation::BeamSpec beam;
    beam.waist = c.get_um("beam.waist_um");
    beam.wavelength = c.get_um("beam.wavelength_um");
    beam.detuning_center = c.get_mhz("beam.detuning_MHz");
    beam.linewidth = c.get_mhz("beam.linewidth_MHz");
    excitation::PhysicalSamplerSpec ps;
    ps.cloud_size = static_cast<int>(c.get_int("sampler.cloud_size", 10000));
    ps.calibration_draws =
        static_cast<int>(c.get_int("sampler.calibration_draws", 2000));
    auto res = excitation::sample_positions_physical(cloud, beam, curve,
                                                     s.n_exc, seed, ps);
    s.positions = res.positions;
  } else {
    throw ConfigError("schedule.sampler must be origin, gaussian or physical");
  }
}

solver::StepPlan make_plan(const io::Config& c,
                           const potentials::PotentialCurve& curve) {
  double vmax = 0.0;
  for (double v : curve.v) vmax = std::max(vmax, std::abs(v));
  solver::StepPlan plan;
  plan.dt = c.has("run.dt_ns") ? c.get_ns("run.dt_ns")
                               : plan.max_dt_for(vmax);
  plan.dt_free = c.has("run.dt_free_ns") ? c.get_ns("run.dt_free_ns") : 1e-8;
  return plan;
}

std::vector<double> observer_times(const io::Config& c) {
  auto us = c.get_doubles("run.observe_us");
  std::vector<double> out;
  for (double t : us) out.push_back(t * 1e-6);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// planned solver-step count, mirroring the event/interval arithmetic of the
// sequence driver (telemetry only)
long planned_steps(const solver::SequenceSpec& spec, double t_start) {
  solver::detail::EventList events(spec, t_start);
  long n = 0;
  double t = t_start;
  for (double te : events.times) {
    if (te > spec.t_final) break;
    bool active = solver::detail::impurity_active(0.5 * (t + te),
                                                  spec.schedule);
    double dt = active ? spec.plan.dt : spec.plan.free_dt();
    n += static_cast<long>(std::ceil((te - t) / dt - 1e-9));
    t = te;
  }
  return n;
}

std::string snap_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%03zu.awia", index);
  return buf;
}

// ---- subcommands ----

int cmd_potential(const CliOptions& o) {
  auto c = load_config(o);
  auto curve = make_curve(c);
  fs::create_directories(o.out);
  std::string kind = potentials::kind_name(curve.kind);
  std::string path = (fs::path(o.out) / ("curve_" + kind + ".txt")).string();
  potentials::save_curve(curve, path);

  double vmin = 0.0, rmin = 0.0;
  long wells = 0;
  for (std::size_t i = 1; i + 1 < curve.v.size(); ++i) {
    if (curve.v[i] < vmin) {
      vmin = curve.v[i];
      rmin = curve.r[i];
    }
    if (curve.v[i] < 0.0 && curve.v[i] < curve.v[i - 1] &&
        curve.v[i] <= curve.v[i + 1])
      ++wells;
  }
  std::printf("curve      %s\n", path.c_str());
  std::printf("kind       %s\n", kind.c_str());
  std::printf("min_V_MHz  %.6g\n", vmin / 1e6);
  std::printf("at_r_um    %.6g\n", rmin * 1e6);
  std::printf("R_min_um   %.6g\n", curve.r_min_marker * 1e6);
  std::printf("R_ct_um    %.6g\n", curve.r_ct * 1e6);
  std::printf("wells      %ld\n", wells);
  return 0;
}

int cmd_run(const CliOptions& o) {
  auto c = load_config(o);
  auto t_wall0 = std::chrono::steady_clock::now();
  fs::create_directories(o.out);

  auto curve = potentials::load_curve(c.get("run.curve"));
  std::uint64_t seed =
      o.seed ? *o.seed : c.get_seed("schedule.seed", 0);
  auto sched = make_schedule(c, seed);
  assign_positions(sched, c, curve, seed);
  auto plan = make_plan(c, curve);
  double rho0 = c.get_double("run.rho0_per_um3", 400.0) * 1e18;

  solver::SequenceSpec spec;
  spec.schedule = sched;
  spec.t_final = c.get_us("run.t_final_us");
  spec.observer_times = observer_times(c);
  spec.plan = plan;
  spec.cell_average = c.get_bool("run.cell_average", false);

  long ckpt_every = c.get_int("run.checkpoint_every", 500);
  double ckpt_interval = ckpt_every * plan.dt;
  std::vector<double> ckpt_times;
  for (double t = ckpt_interval; t < spec.t_final; t += ckpt_interval)
    ckpt_times.push_back(t);
  auto obs_only = spec.observer_times;  // configured times -> snapshot index
  spec.observer_times.insert(spec.observer_times.end(), ckpt_times.begin(),
                             ckpt_times.end());
  std::sort(spec.observer_times.begin(), spec.observer_times.end());
  spec.observer_times.erase(
      std::unique(spec.observer_times.begin(), spec.observer_times.end()),
      spec.observer_times.end());

  double abort_at = o.abort_at ? *o.abort_at : -1.0;

  io::RunManifest man;
  man.config_hash = c.hash();
  man.base_seed = seed;
  std::string man_path = (fs::path(o.out) / "manifest.txt").string();
  std::string ckpt_path = (fs::path(o.out) / "ckpt.awia").string();

  // resume from the newest checkpoint if the output directory has one
  bool resuming = false;
  if (fs::exists(man_path)) {
    auto prev = io::read_manifest(man_path);
    if (prev.config_hash != c.hash())
      throw ConfigError(
          "output directory holds a checkpoint for a different "
          "configuration; refusing to mix runs");
    if (!prev.checkpoint_file.empty()) {
      resuming = true;
      man = prev;
      // drop observer/checkpoint firings already behind the checkpoint;
      // the full lists keep their indices for stable snapshot names
      double t0 = io::snapshot_time(ckpt_path);
      std::erase_if(spec.observer_times,
                    [&](double t) { return t < t0; });
    }
  }

  std::string mode = c.get("run.mode", "radial");
  auto update_manifest = [&](double time_s, bool is_ckpt,
                             const std::string& file) {
    if (is_ckpt) {
      man.checkpoint_file = file;
      man.checkpoint_step =
          static_cast<long>(std::lround(time_s / ckpt_interval)) * ckpt_every;
    } else {
      auto it = std::lower_bound(obs_only.begin(), obs_only.end(), time_s);
      std::size_t idx = static_cast<std::size_t>(it - obs_only.begin());
      bool present = false;
      for (auto& e : man.snapshots)
        if (e.file == file) present = true;
      if (!present) man.snapshots.push_back({time_s, file});
      (void)idx;
    }
    man.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t_wall0)
                      .count();
    io::write_manifest(man_path, man);
  };

  auto handle_time = [&](double t, auto&& write_snap, auto&& write_ckpt) {
    auto it = std::lower_bound(obs_only.begin(), obs_only.end(), t);
    if (it != obs_only.end() && *it == t) {
      std::size_t idx = static_cast<std::size_t>(it - obs_only.begin());
      std::string file = snap_name(idx);
      write_snap((fs::path(o.out) / file).string());
      update_manifest(t, false, file);
    }
    bool at_ckpt =
        std::binary_search(ckpt_times.begin(), ckpt_times.end(), t);
    if (at_ckpt) {
      write_ckpt(ckpt_path);
      update_manifest(t, true, "ckpt.awia");
    }
    if (abort_at >= 0.0 && at_ckpt && t >= abort_at) throw AbortRequested{};
  };

  if (mode == "radial") {
    RadialGrid grid{static_cast<int>(c.get_int("grid.n")),
                    c.get_um("grid.r_max_um") /
                        c.get_double("grid.n")};
    RadialField f;
    if (resuming)
      f = io::read_radial_snapshot(ckpt_path);
    else
      f = homogeneous_radial_field(grid, rho0, u0_default);
    auto v_hz = solver::sample_curve(curve, f.grid);
    solver::SolverRadial sol(f.grid, u0_default);
    solver::run_sequence_radial(sol, f, v_hz, spec, [&](const RadialField& x) {
      handle_time(
          x.time, [&](const std::string& p) { io::write_snapshot(p, x); },
          [&](const std::string& p) { io::write_snapshot(p, x); });
    });
    if (sol.boundary_warning())
      std::fprintf(stderr,
                   "warning: density reached the outer radial boundary\n");
  } else if (mode == "lattice") {
    auto nv = c.get_doubles("grid.n");
    auto box = c.get_um_list("grid.box_um");
    if (nv.size() != 3 || box.size() != 3)
      throw ConfigError("lattice mode needs grid.n and grid.box_um (3 each)");
    Lattice3 grid{{static_cast<int>(nv[0]), static_cast<int>(nv[1]),
                   static_cast<int>(nv[2])},
                  {box[0] / nv[0], box[1] / nv[1], box[2] / nv[2]}};
    LatticeField f;
    if (resuming)
      f = io::read_lattice_snapshot(ckpt_path);
    else
      f = homogeneous_field(grid, rho0, u0_default);
    solver::TrapSpec trap;
    solver::SpongeSpec sponge;
    sponge.enabled = c.get_bool("run.sponge", false);
    solver::Solver3d sol(grid, trap, u0_default,
                         c.get_double("run.k3_m6_s", 0.0), sponge);
    solver::run_sequence(sol, f, curve, spec, [&](const LatticeField& x) {
      handle_time(
          x.time, [&](const std::string& p) { io::write_snapshot(p, x); },
          [&](const std::string& p) { io::write_snapshot(p, x); });
    });
  } else {
    throw ConfigError("run.mode must be radial or lattice");
  }

  // completed: the checkpoint is no longer needed
  man.checkpoint_file.clear();
  man.checkpoint_step = 0;
  man.step_count = planned_steps(spec, 0.0);
  man.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t_wall0)
                    .count();
  io::write_manifest(man_path, man);
  if (fs::exists(ckpt_path)) fs::remove(ckpt_path);
  std::printf("run complete: %zu snapshots in %s\n", man.snapshots.size(),
              o.out.c_str());
  return 0;
}

int cmd_ensemble(const CliOptions& o) {
  auto c = load_config(o);
  fs::create_directories(o.out);
  auto curve = potentials::load_curve(c.get("run.curve"));
  std::uint64_t seed = o.seed ? *o.seed : c.get_seed("ensemble.base_seed", 0);
  double rho0 = c.get_double("run.rho0_per_um3", 400.0) * 1e18;

  auto nv = c.get_doubles("grid.n");
  auto box = c.get_um_list("grid.box_um");
  if (nv.size() != 3 || box.size() != 3)
    throw ConfigError("ensemble needs grid.n and grid.box_um (3 each)");
  Lattice3 grid{{static_cast<int>(nv[0]), static_cast<int>(nv[1]),
                 static_cast<int>(nv[2])},
                {box[0] / nv[0], box[1] / nv[1], box[2] / nv[2]}};

  twa::EnsembleSpec espec;
  espec.n_traj = static_cast<int>(c.get_int("ensemble.n_traj"));
  espec.base_seed = seed;
  // cutoff given as k in rad/um for readability
  espec.mode_cutoff = c.get_double("ensemble.mode_cutoff_per_um", 0.0) * 1e6;
  std::string pm = c.get("ensemble.position_mode", "resample");
  if (pm == "shared")
    espec.position_mode = twa::PositionMode::SHARED;
  else if (pm != "resample")
    throw ConfigError("ensemble.position_mode must be resample or shared");

  auto base_sched = make_schedule(c, seed);
  auto plan = make_plan(c, curve);
  double t_final = c.get_us("run.t_final_us");
  auto times = observer_times(c);

  auto modes = twa::bogoliubov_modes(grid, rho0, u0_default,
                                     espec.mode_cutoff);
  auto positions_for = [&](int traj) {
    io::Config cc = c;  // same sampler config per trajectory
    auto s = base_sched;
    std::uint64_t ps =
        espec.position_mode == twa::PositionMode::SHARED
            ? seed
            : rng::substream_seed(seed, "traj-positions", traj);
    assign_positions(s, cc, curve, ps);
    return s.positions;
  };

  solver::TrapSpec trap;
  auto out = twa::run_ensemble(
      espec, modes, rho0, times.size(),
      [&](int traj, LatticeField& f, const auto& observe) {
        solver::SequenceSpec spec;
        spec.schedule = base_sched;
        spec.schedule.positions = positions_for(traj);
        spec.t_final = t_final;
        spec.observer_times = times;
        spec.plan = plan;
        solver::Solver3d sol(grid, trap, u0_default);
        solver::run_sequence(sol, f, curve, spec, observe);
      });

  std::string table = (fs::path(o.out) / "ensemble.txt").string();
  {
    std::ofstream tab(table);
    if (!tab) throw IoError("cannot write " + table);
    tab.precision(10);
    tab << "# time_s n_u se_n_u n_traj delta_c_m3\n";
    for (std::size_t i = 0; i < out.size(); ++i) {
      tab << out[i].time << " " << out[i].n_u << " " << out[i].se_n_u << " "
          << out[i].n_traj << " " << out[i].delta_c << "\n";
      // density fields exported in the snapshot container (value in the
      // real part)
      auto dump = [&](const std::vector<double>& v, const char* tag) {
        LatticeField d;
        d.grid = grid;
        d.time = out[i].time;
        d.rho0 = rho0;
        d.mu = u0_default * rho0;
        d.psi.resize(v.size());
        for (std::size_t q = 0; q < v.size(); ++q) d.psi[q] = v[q];
        char buf[48];
        std::snprintf(buf, sizeof buf, "%s_%03zu.awia", tag, i);
        io::write_snapshot((fs::path(o.out) / buf).string(), d);
      };
      dump(out[i].rho_t, "rho_t");
      if (out[i].split_valid) {
        dump(out[i].rho_c, "rho_c");
        dump(out[i].rho_u, "rho_u");
      }
    }
    if (!tab) throw IoError("write failed: " + table);
  }
  std::printf("ensemble complete: %zu times, %d trajectories\n", out.size(),
              espec.n_traj);
  return 0;
}

int cmd_analyze(const CliOptions& o) {
  auto c = load_config(o);
  fs::create_directories(o.out);
  std::string recipe = c.get("analyze.recipe");
  std::string input = c.get("analyze.input");

  if (recipe == "identity") {
    auto kind = io::snapshot_kind(input);
    std::string outp = (fs::path(o.out) / "reexport.awia").string();
    if (kind == io::SnapshotKind::LATTICE)
      io::write_snapshot(outp, io::read_lattice_snapshot(input));
    else
      io::write_snapshot(outp, io::read_radial_snapshot(input));
    std::printf("re-exported %s\n", outp.c_str());
    return 0;
  }

  if (recipe == "radial") {
    std::string outp = (fs::path(o.out) / "profile.txt").string();
    std::ofstream tab(outp);
    if (!tab) throw IoError("cannot write " + outp);
    tab.precision(10);
    tab << "# r_m sqrt_r value\n";
    if (io::snapshot_kind(input) == io::SnapshotKind::RADIAL) {
      auto f = io::read_radial_snapshot(input);
      auto rho = f.density();
      for (std::size_t i = 0; i < rho.size(); ++i) {
        double r = f.grid.r(static_cast<int>(i));
        tab << r << " " << std::sqrt(r) << " " << rho[i] << "\n";
      }
    } else {
      auto f = io::read_lattice_snapshot(input);
      auto p = analysis::radial_profile(f.density(), f.grid, {0.0, 0.0, 0.0});
      for (std::size_t b = 0; b < p.r.size(); ++b)
        if (p.count[b] > 0)
          tab << p.r[b] << " " << p.sqrt_r[b] << " " << p.value[b] << "\n";
    }
    std::printf("wrote %s\n", outp.c_str());
    return 0;
  }

  if (recipe == "column" || recipe == "contrast") {
    auto f = io::read_lattice_snapshot(input);
    analysis::SmoothingKernel kernel;
    if (c.has("analyze.sigma_um")) kernel.sigma = c.get_um("analyze.sigma_um");
    auto col =
        analysis::column_density(analysis::smooth(f.density(), f.grid, kernel),
                                 f.grid);
    std::string outp = (fs::path(o.out) / "column.txt").string();
    std::ofstream tab(outp);
    if (!tab) throw IoError("cannot write " + outp);
    tab.precision(10);
    tab << "# x_m y_m value\n";
    for (int i = 0; i < col.nx; ++i)
      for (int j = 0; j < col.ny; ++j)
        tab << f.grid.coord(0, i) << " " << f.grid.coord(1, j) << " "
            << col.at(i, j) << "\n";
    if (recipe == "contrast") {
      auto ref = io::read_lattice_snapshot(c.get("analyze.reference"));
      auto col0 = analysis::column_density(
          analysis::smooth(ref.density(), ref.grid, kernel), ref.grid);
      if (col0.nx != col.nx || col0.ny != col.ny)
        throw ConfigError("contrast: reference grid does not match input");
      analysis::Field2d dev = col;
      double back = 0.0;
      for (double x : col0.v) back += x;
      back /= static_cast<double>(col0.v.size());
      for (std::size_t q = 0; q < dev.v.size(); ++q)
        dev.v[q] = (col.v[q] - col0.v[q]) / back;
      auto rep = analysis::contrast(dev, back, f.time);
      std::printf("chi_c %.6g at t = %.6g s (background %.6g m^-2)\n",
                  rep.chi_c, rep.time, rep.rho_c0);
    }
    std::printf("wrote %s\n", outp.c_str());
    return 0;
  }

  throw ConfigError(
      "analyze.recipe must be identity, radial, column or contrast");
}

int cmd_verify(const CliOptions& o, const char* argv0) {
  std::vector<std::string> candidates;
  if (const char* env = std::getenv("AWIA_ACCEPTANCE")) candidates.push_back(env);
  fs::path self(argv0);
  if (self.has_parent_path()) {
    candidates.push_back((self.parent_path() / "../tests/acceptance").string());
    candidates.push_back((self.parent_path() / "acceptance").string());
  }
  candidates.push_back("tests/acceptance");
  for (const auto& cand : candidates) {
    if (fs::exists(cand)) {
      int rc = std::system(cand.c_str());
      if (rc < 0) throw IoError("failed to launch " + cand);
      (void)o;
      return rc == 0 ? 0 : 3;
    }
  }
  throw IoError(
      "acceptance binary not found (set AWIA_ACCEPTANCE or build the "
      "tests)");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) return usage();
  std::string cmd = argv[1];
  try {
    auto opts = parse_options(argc, argv, 2);
    if (cmd == "potential") return cmd_potential(opts);
    if (cmd == "run") return cmd_run(opts);
    if (cmd == "ensemble") return cmd_ensemble(opts);
    if (cmd == "analyze") return cmd_analyze(opts);
    if (cmd == "verify") return cmd_verify(opts, argv[0]);
    std::cerr << "unknown subcommand: " << cmd << "\n";
    return usage();
  } catch (const AbortRequested&) {
    std::fprintf(stderr, "aborted at the requested time (checkpoint kept)\n");
    return 3;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
