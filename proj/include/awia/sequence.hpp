#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "awia/errors.hpp"
#include "awia/excitation.hpp"
#include "awia/field.hpp"
#include "awia/rasterize.hpp"
#include "awia/solver3d.hpp"
#include "awia/solver_radial.hpp"

namespace awia::solver {

// A full excitation sequence: n_exc pulse cycles with the impurity potential
// centred at the scheduled positions, then free evolution to t_final.
// Observers fire at the listed times (and see the field with time set).
struct SequenceSpec {
  excitation::ExcitationSchedule schedule;
  double t_final = 0.0;                // s
  std::vector<double> observer_times;  // s, need not be sorted
  StepPlan plan;
  bool cell_average = false;  // rasterization mode for the impurity
};

namespace detail {

// Outside [t_exc - margin, t_imp + margin] within a cycle the pulse is
// below ~1e-17 and the impurity term is dropped entirely, so the free-
// evolution step size applies.
inline double active_margin(const excitation::ExcitationSchedule& s) {
  return 20.0 * s.rise_time;
}

struct EventList {
  std::vector<double> times;

  EventList(const SequenceSpec& spec, double t_start) {
    const auto& s = spec.schedule;
    double m = active_margin(s);
    for (int n = 0; n < s.n_exc; ++n) {
      times.push_back(n * s.period() + std::max(0.0, s.t_exc - m));
      times.push_back(n * s.period() + std::min(s.period(), s.t_imp + m));
    }
    for (double t : spec.observer_times) times.push_back(t);
    times.push_back(spec.t_final);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    while (!times.empty() && times.front() <= t_start)
      times.erase(times.begin());
  }
};

inline bool impurity_active(double t, const excitation::ExcitationSchedule& s) {
  double tau = s.period();
  int n = static_cast<int>(std::floor(t / tau));
  if (n < 0 || n >= s.n_exc) return false;
  double tc = t - n * tau;
  double m = active_margin(s);
  return tc > s.t_exc - m && tc < s.t_imp + m;
}

inline bool is_observer_time(double t, const SequenceSpec& spec) {
  for (double o : spec.observer_times)
    if (o == t) return true;
  return false;
}

}  // namespace detail

inline void check_sequence(const SequenceSpec& spec, double vmax_hz,
                           double t_start) {
  spec.schedule.validate();
  spec.plan.validate(vmax_hz);
  if (!(spec.t_final > t_start))
    throw ConfigError("run_sequence: t_final must exceed the start time");
  for (double t : spec.observer_times)
    if (t < t_start || t > spec.t_final)
      throw ConfigError("run_sequence: observer time " + std::to_string(t) +
                        " s outside [start, t_final]");
}

inline void run_sequence(Solver3d& solver, LatticeField& f,
                         const potentials::PotentialCurve& curve,
                         const SequenceSpec& spec,
                         const std::function<void(const LatticeField&)>&
                             observer = nullptr) {
  curve.validate();
  double vmax = 0.0;
  for (double v : curve.v) vmax = std::max(vmax, std::abs(v));
  check_sequence(spec, vmax, f.time);
  const auto& sched = spec.schedule;
  if (observer && detail::is_observer_time(f.time, spec)) observer(f);

  potentials::PotentialField imp;
  int imp_window = -1;
  detail::EventList events(spec, f.time);
  for (double t_event : events.times) {
    if (t_event > spec.t_final) break;
    bool active = detail::impurity_active(
        0.5 * (f.time + t_event), sched);
    double dt_base = active ? spec.plan.dt : spec.plan.free_dt();
    if (active) {
      int n = excitation::window_index(0.5 * (f.time + t_event), sched);
      if (n != imp_window) {
        imp = potentials::rasterize(curve, solver.grid(), sched.positions[n],
                                    spec.cell_average);
        imp_window = n;
      }
    }
    while (f.time < t_event) {
      double dt = std::min(dt_base, t_event - f.time);
      if (t_event - f.time - dt < 1e-9 * dt_base) dt = t_event - f.time;
      if (!(dt > 0.0)) break;
      try {
        if (active)
          solver.step(f, dt, &imp,
                      excitation::eta(f.time + 0.5 * dt, sched));
        else
          solver.step(f, dt);
      } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " (excitation window " +
                             std::to_string(excitation::window_index(
                                 f.time, sched)) +
                             ")");
      }
    }
    f.time = t_event;  // absorb accumulated rounding at event boundaries
    if (observer && detail::is_observer_time(t_event, spec)) observer(f);
  }
}

inline void run_sequence_radial(SolverRadial& solver, RadialField& f,
                                const std::vector<double>& v_hz,
                                const SequenceSpec& spec,
                                const std::function<void(const RadialField&)>&
                                    observer = nullptr) {
  double vmax = 0.0;
  for (double v : v_hz) vmax = std::max(vmax, std::abs(v));
  check_sequence(spec, vmax, f.time);
  const auto& sched = spec.schedule;
  for (const auto& p : sched.positions)
    if (p != excitation::Vec3{0.0, 0.0, 0.0})
      throw ConfigError(
          "run_sequence_radial: the radial solver is spherically symmetric; "
          "all excitation positions must be the origin");
  if (observer && detail::is_observer_time(f.time, spec)) observer(f);

  detail::EventList events(spec, f.time);
  static const std::vector<double> no_v;
  for (double t_event : events.times) {
    if (t_event > spec.t_final) break;
    bool active = detail::impurity_active(0.5 * (f.time + t_event), sched);
    double dt_base = active ? spec.plan.dt : spec.plan.free_dt();
    while (f.time < t_event) {
      double dt = std::min(dt_base, t_event - f.time);
      if (t_event - f.time - dt < 1e-9 * dt_base) dt = t_event - f.time;
      if (!(dt > 0.0)) break;
      if (active)
        solver.step(f, dt, v_hz, excitation::eta(f.time + 0.5 * dt, sched));
      else
        solver.step(f, dt, no_v);
    }
    f.time = t_event;
    if (observer && detail::is_observer_time(t_event, spec)) observer(f);
  }
}

}  // namespace awia::solver
