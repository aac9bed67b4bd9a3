#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ks2d/errors.hpp"
#include "ks2d/grid.hpp"
#include "ks2d/solver.hpp"
#include "ks2d/transform.hpp"

namespace ks2d {

struct ErrorPair {
  double l2 = 0.0;
  double linf = 0.0;
};

/// Relative L2 and Linf errors of a field against a reference, taken over
/// raw grid entries (no quadrature weights).
inline ErrorPair relative_errors(const PhysicalField& u, const PhysicalField& u_ref) {
  if (u.n != u_ref.n) throw std::invalid_argument("relative_errors: dimension mismatch");
  double diff_sq = 0.0, ref_sq = 0.0, diff_max = 0.0, ref_max = 0.0;
  for (std::size_t m = 0; m < u.values.size(); ++m) {
    const double d = u.values[m] - u_ref.values[m];
    diff_sq += d * d;
    ref_sq += u_ref.values[m] * u_ref.values[m];
    diff_max = std::max(diff_max, std::abs(d));
    ref_max = std::max(ref_max, std::abs(u_ref.values[m]));
  }
  if (ref_sq == 0.0 || ref_max == 0.0)
    throw std::domain_error("relative_errors: reference field has zero norm");
  return {std::sqrt(diff_sq / ref_sq), diff_max / ref_max};
}

namespace detail {

// Per-dimension spectral slot mapping for resampling: (dst slot, src slot,
// weight). Interior modes copy over; the Nyquist pair is merged when
// truncating and split evenly when padding, which keeps real fields real and
// makes band truncation idempotent.
struct SlotEntry {
  int dst;
  int src;
  double weight;
};

inline std::vector<SlotEntry> resample_slots(int n_src, int n_dst) {
  std::vector<SlotEntry> entries;
  const int lim = std::min(n_src, n_dst);
  for (int k = -(lim / 2) + 1; k <= lim / 2 - 1; ++k)
    entries.push_back({(k + n_dst) % n_dst, (k + n_src) % n_src, 1.0});
  if (n_dst < n_src) {
    entries.push_back({n_dst / 2, n_dst / 2, 1.0});
    entries.push_back({n_dst / 2, n_src - n_dst / 2, 1.0});
  } else if (n_dst == n_src) {
    entries.push_back({n_dst / 2, n_src / 2, 1.0});
  } else {
    entries.push_back({n_src / 2, n_src / 2, 0.5});
    entries.push_back({n_dst - n_src / 2, n_src / 2, 0.5});
  }
  return entries;
}

}  // namespace detail

/// Resample a field onto an n_dst-point grid by centered spectral truncation
/// or zero padding, with the Nyquist pair handled symmetrically. Band-limited
/// fields resample exactly.
inline PhysicalField spectral_resample(const PhysicalField& u, int n_dst) {
  GridSpec{u.n, 1.0, 1.0}.validate();
  GridSpec{n_dst, 1.0, 1.0}.validate();
  const int n_src = u.n;
  if (n_src == n_dst) return u;

  const SpectralField src = forward_transform(u);
  SpectralField dst(n_dst);
  const auto slots = detail::resample_slots(n_src, n_dst);
  for (const auto& row : slots)
    for (const auto& col : slots)
      dst(row.dst, col.dst) += row.weight * col.weight * src(row.src, col.src);

  const double rescale = static_cast<double>(n_dst) * n_dst / (static_cast<double>(n_src) * n_src);
  for (auto& c : dst.coeffs) c *= rescale;
  return inverse_transform(dst);
}

struct ConvergenceRow {
  double axis_value = 0.0;
  std::vector<ErrorPair> errors;  // one entry per checkpoint
  double wall_time_seconds = 0.0;
};

/// Relative errors and timings across one refinement axis. The reference row
/// comes last and has zero errors by definition.
struct ConvergenceReport {
  std::string axis_label;
  std::vector<double> checkpoints;
  std::vector<ConvergenceRow> rows;
  double reference_value = 0.0;
};

struct StudyRun {
  double axis_value = 0.0;
  PhysicalField terminal;
};

struct StudyResult {
  ConvergenceReport report;
  std::vector<StudyRun> terminal_states;  // one per row, reference last
};

namespace detail {

inline std::vector<long> checkpoint_steps(double dt, const std::vector<double>& t_checkpoints) {
  if (t_checkpoints.empty()) throw config_error("t_checkpoints: must not be empty");
  std::vector<long> steps;
  for (double t : t_checkpoints) {
    if (!(t > 0.0)) throw config_error("t_checkpoints: entries must be positive");
    const long s = std::lround(t / dt);
    if (s < 1 || std::abs(static_cast<double>(s) * dt - t) > step_count_tolerance * t)
      throw config_error("t_checkpoints: " + std::to_string(t) +
                         " is not an integer multiple of dt = " + std::to_string(dt));
    if (!steps.empty() && s <= steps.back())
      throw config_error("t_checkpoints: must be strictly increasing");
    steps.push_back(s);
  }
  return steps;
}

inline std::vector<long> with_initial_step(std::vector<long> steps) {
  steps.insert(steps.begin(), 0);
  return steps;
}

inline Trajectory run_member(SolverConfig config, const std::vector<long>& save_steps,
                             const std::string& axis_label, double axis_value) {
  config.n_save = static_cast<int>(save_steps.size());
  Trajectory traj = run_with_save_steps(config, initial_condition(config.grid), save_steps);
  if (traj.diverged())
    throw divergence_error(axis_label + " = " + std::to_string(axis_value) +
                           ": run diverged at step " + std::to_string(traj.divergence->step));
  return traj;
}

}  // namespace detail

/// Self-convergence in grid size: one highly refined reference at n_ref,
/// one run per entry of n_list, errors measured at each checkpoint after
/// resampling the reference down to the coarse grid. The template supplies
/// dt, length scales and operator settings; its n and t_final are ignored.
inline StudyResult spatial_convergence_study(const SolverConfig& tmpl, std::vector<int> n_list,
                                             int n_ref, const std::vector<double>& t_checkpoints) {
  if (n_list.empty()) throw config_error("n_list: must not be empty");
  if (n_ref <= *std::max_element(n_list.begin(), n_list.end()))
    throw config_error("n_ref: reference grid must exceed every entry of n_list");
  const std::vector<long> marks = detail::checkpoint_steps(tmpl.dt, t_checkpoints);
  const std::vector<long> saves = detail::with_initial_step(marks);

  SolverConfig config = tmpl;
  config.t_final = t_checkpoints.back();

  config.grid.n = n_ref;
  const Trajectory ref = detail::run_member(config, saves, "n", n_ref);

  StudyResult result;
  result.report.axis_label = "grid_size";
  result.report.checkpoints = t_checkpoints;
  result.report.reference_value = n_ref;

  for (int n : n_list) {
    config.grid.n = n;
    const Trajectory traj = detail::run_member(config, saves, "n", n);
    ConvergenceRow row{static_cast<double>(n), {}, traj.wall_time_seconds};
    for (std::size_t c = 0; c < marks.size(); ++c) {
      const PhysicalField coarse_ref = spectral_resample(ref.snapshots[c + 1], n);
      row.errors.push_back(relative_errors(traj.snapshots[c + 1], coarse_ref));
    }
    result.report.rows.push_back(std::move(row));
    result.terminal_states.push_back({static_cast<double>(n), traj.snapshots.back()});
  }

  ConvergenceRow ref_row{static_cast<double>(n_ref),
                         std::vector<ErrorPair>(marks.size(), ErrorPair{}),
                         ref.wall_time_seconds};
  result.report.rows.push_back(std::move(ref_row));
  result.terminal_states.push_back({static_cast<double>(n_ref), ref.snapshots.back()});
  return result;
}

/// Self-convergence in step size at fixed n: reference at dt_ref, one run
/// per entry of dt_list, errors at each checkpoint (no resampling). The
/// template supplies the grid and operator settings; its dt and t_final are
/// ignored.
inline StudyResult temporal_convergence_study(const SolverConfig& tmpl,
                                              const std::vector<double>& dt_list, double dt_ref,
                                              const std::vector<double>& t_checkpoints) {
  if (dt_list.empty()) throw config_error("dt_list: must not be empty");
  if (!(dt_ref > 0.0) || dt_ref >= *std::min_element(dt_list.begin(), dt_list.end()))
    throw config_error("dt_ref: reference step must be below every entry of dt_list");

  SolverConfig config = tmpl;
  config.t_final = t_checkpoints.back();

  config.dt = dt_ref;
  const Trajectory ref =
      detail::run_member(config, detail::with_initial_step(detail::checkpoint_steps(dt_ref, t_checkpoints)),
                         "dt", dt_ref);

  StudyResult result;
  result.report.axis_label = "dt";
  result.report.checkpoints = t_checkpoints;
  result.report.reference_value = dt_ref;

  for (double dt : dt_list) {
    config.dt = dt;
    const std::vector<long> marks = detail::checkpoint_steps(dt, t_checkpoints);
    const Trajectory traj = detail::run_member(config, detail::with_initial_step(marks), "dt", dt);
    ConvergenceRow row{dt, {}, traj.wall_time_seconds};
    for (std::size_t c = 0; c < marks.size(); ++c)
      row.errors.push_back(relative_errors(traj.snapshots[c + 1], ref.snapshots[c + 1]));
    result.report.rows.push_back(std::move(row));
    result.terminal_states.push_back({dt, traj.snapshots.back()});
  }

  ConvergenceRow ref_row{dt_ref, std::vector<ErrorPair>(t_checkpoints.size(), ErrorPair{}),
                         ref.wall_time_seconds};
  result.report.rows.push_back(std::move(ref_row));
  result.terminal_states.push_back({dt_ref, ref.snapshots.back()});
  return result;
}

/// Observed order between adjacent refinement levels,
/// p_i = ln(e_i / e_{i+1}) / ln(h_i / h_{i+1}).
inline std::vector<double> estimate_order(const std::vector<double>& errors,
                                          const std::vector<double>& steps) {
  if (errors.size() != steps.size() || errors.size() < 2)
    throw std::invalid_argument("estimate_order: need equal-length lists of at least 2 entries");
  for (double e : errors)
    if (!(e > 0.0)) throw std::domain_error("estimate_order: errors must be positive");
  for (std::size_t m = 0; m + 1 < steps.size(); ++m)
    if (!(steps[m] > steps[m + 1]) || !(steps[m + 1] > 0.0))
      throw std::invalid_argument("estimate_order: steps must be positive and strictly decreasing");
  std::vector<double> orders;
  for (std::size_t m = 0; m + 1 < errors.size(); ++m)
    orders.push_back(std::log(errors[m] / errors[m + 1]) / std::log(steps[m] / steps[m + 1]));
  return orders;
}

/// Exact solution of the purely linear problem: per-mode exponential decay
/// u_hat(t) = u_hat(0) * exp(-lambda t). Oracle for integrator order tests.
inline SpectralField linear_exact_solution(const SpectralField& u0_hat, const LinearSymbol& symbol,
                                           double t) {
  if (u0_hat.n != symbol.n)
    throw std::invalid_argument("linear_exact_solution: dimension mismatch");
  if (!(t >= 0.0)) throw std::invalid_argument("linear_exact_solution: t must be nonnegative");
  SpectralField out = u0_hat;
  for (std::size_t m = 0; m < out.coeffs.size(); ++m)
    out.coeffs[m] *= std::exp(-symbol.lambda[m] * t);
  return out;
}

struct SweepEntry {
  double lx1 = 0.0;
  double lx2 = 0.0;
  Trajectory trajectory;
};

/// Run every (lx1, lx2) pair of the two lists. Divergent members are
/// reported through their trajectory flag, not by aborting the sweep.
inline std::vector<SweepEntry> length_scale_sweep(const SolverConfig& tmpl,
                                                  const std::vector<double>& lx1_list,
                                                  const std::vector<double>& lx2_list) {
  if (lx1_list.empty() || lx2_list.empty())
    throw config_error("lx1_list/lx2_list: must not be empty");
  std::vector<SweepEntry> entries;
  for (double lx1 : lx1_list)
    for (double lx2 : lx2_list) {
      SolverConfig config = tmpl;
      config.grid.lx1 = lx1;
      config.grid.lx2 = lx2;
      entries.push_back({lx1, lx2, run(config)});
    }
  return entries;
}

struct TimeWindowResult {
  std::vector<double> windows;
  std::vector<PhysicalField> window_states;  // terminal state of each window
  Trajectory trajectory;                     // the single run at max(windows)
};

/// One run out to the largest window with save instants at every requested
/// window; by determinism each extracted state equals a standalone run of
/// that length.
inline TimeWindowResult time_window_study(const SolverConfig& tmpl,
                                          const std::vector<double>& t_list) {
  const std::vector<long> marks = detail::checkpoint_steps(tmpl.dt, t_list);
  SolverConfig config = tmpl;
  config.t_final = t_list.back();
  TimeWindowResult result;
  result.windows = t_list;
  result.trajectory =
      detail::run_member(config, detail::with_initial_step(marks), "t_final", t_list.back());
  for (std::size_t c = 0; c < marks.size(); ++c)
    result.window_states.push_back(result.trajectory.snapshots[c + 1]);
  return result;
}

}  // namespace ks2d
