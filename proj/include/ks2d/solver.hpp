#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ks2d/errors.hpp"
#include "ks2d/grid.hpp"
#include "ks2d/imex.hpp"
#include "ks2d/operators.hpp"
#include "ks2d/transform.hpp"

namespace ks2d {

/// Saved snapshots must come back from spectral space essentially real;
/// larger residues indicate a broken conjugate symmetry.
inline constexpr double reality_threshold = 1e-8;

/// Relative slack when checking that t_final is an integer multiple of dt.
inline constexpr double step_count_tolerance = 1e-9;

struct SolverConfig {
  GridSpec grid;
  double dt = 1e-3;
  double t_final = 1.0;
  int n_save = 11;
  OperatorMode operator_mode = OperatorMode::paper;
  ScalingMode scaling_mode = ScalingMode::paper;
  bool nonlinear_enabled = true;
  double blowup_ceiling = 1e6;

  /// Number of time steps, round(t_final/dt). Partial trailing steps are
  /// disallowed: t_final must be an integer multiple of dt.
  long step_count() const {
    const long n_time = std::lround(t_final / dt);
    if (n_time < 1 || std::abs(static_cast<double>(n_time) * dt - t_final) >
                          step_count_tolerance * t_final)
      throw config_error("t_final: must be a positive integer multiple of dt (t_final = " +
                         std::to_string(t_final) + ", dt = " + std::to_string(dt) + ")");
    return n_time;
  }

  void validate() const {
    grid.validate();
    if (!std::isfinite(dt) || dt <= 0.0) throw config_error("dt: must be positive and finite");
    if (!std::isfinite(t_final) || t_final <= 0.0)
      throw config_error("t_final: must be positive and finite");
    if (dt > t_final) throw config_error("dt: must not exceed t_final");
    const long n_time = step_count();
    if (n_save < 2) throw config_error("n_save: at least 2 snapshots (initial and terminal)");
    if (n_save > n_time + 1)
      throw config_error("n_save: cannot exceed step count + 1 = " + std::to_string(n_time + 1));
    if (!std::isfinite(blowup_ceiling) || blowup_ceiling <= 0.0)
      throw config_error("blowup_ceiling: must be positive and finite");
  }

  bool operator==(const SolverConfig&) const = default;
};

struct SnapshotStats {
  double l2_norm = 0.0;
  double min = 0.0;
  double max = 0.0;
  double imag_residue = 0.0;
};

struct DivergenceInfo {
  enum class Kind { blowup, reality };
  long step = 0;
  double value = 0.0;  // offending max |u| (blowup) or imaginary residue (reality)
  Kind kind = Kind::blowup;
};

/// Time-stamped snapshots of one run plus per-snapshot diagnostics. For a
/// clean run times[0] = 0, the last time equals t_final, and the snapshot
/// count equals n_save; a diverged run stops early and carries the flag.
struct Trajectory {
  SolverConfig config;
  std::vector<double> times;
  std::vector<long> steps;
  std::vector<PhysicalField> snapshots;
  std::vector<SnapshotStats> stats;
  double wall_time_seconds = 0.0;
  std::optional<DivergenceInfo> divergence;

  bool diverged() const { return divergence.has_value(); }
  const PhysicalField& terminal() const { return snapshots.back(); }
};

/// Sinusoidal start state sin(x1 + x2) + sin(x1) + sin(x2) on the grid;
/// periodic identification holds because the grid excludes the endpoint.
inline PhysicalField initial_condition(const GridSpec& spec) {
  auto [x1, x2] = build_physical_grid(spec);
  PhysicalField u0(spec.n);
  for (std::size_t m = 0; m < u0.values.size(); ++m)
    u0.values[m] = std::sin(x1.values[m] + x2.values[m]) + std::sin(x1.values[m]) +
                   std::sin(x2.values[m]);
  return u0;
}

/// Evenly spaced (by step index) save schedule over {0, ..., n_time},
/// always including both endpoints.
inline std::vector<long> save_schedule(long n_time, int n_save) {
  std::vector<long> steps;
  steps.reserve(static_cast<std::size_t>(n_save));
  for (int k = 0; k < n_save; ++k) {
    const long idx = std::lround(static_cast<double>(k) * static_cast<double>(n_time) /
                                 static_cast<double>(n_save - 1));
    if (steps.empty() || idx != steps.back()) steps.push_back(idx);
  }
  return steps;
}

/// Full time march with an explicit list of save steps. The schedule must be
/// strictly increasing, start at 0 and end at the final step.
template <typename InitialField>
Trajectory run_with_save_steps(const SolverConfig& config, const InitialField& u0,
                               const std::vector<long>& save_steps) {
  config.validate();
  if (u0.n != config.grid.n)
    throw std::invalid_argument("run: initial field does not match the grid");
  const long n_time = config.step_count();
  if (save_steps.empty() || save_steps.front() != 0 || save_steps.back() != n_time)
    throw config_error("save schedule must start at step 0 and end at step " +
                       std::to_string(n_time));
  for (std::size_t p = 1; p < save_steps.size(); ++p)
    if (save_steps[p] <= save_steps[p - 1])
      throw config_error("save schedule must be strictly increasing");

  const LinearSymbol symbol =
      build_linear_symbol(config.grid, config.operator_mode, config.scaling_mode);
  const DealiasMask mask = build_dealias_mask(config.grid);
  const ImexCoefficients coeffs = tabulated_coefficients();
  const int n = config.grid.n;
  auto evaluator = [&](const SpectralField& u_hat) {
    if (!config.nonlinear_enabled) return SpectralField(n);
    return nonlinear_term(u_hat, config.grid, mask, config.scaling_mode);
  };

  Trajectory traj;
  traj.config = config;
  const auto t_start = std::chrono::steady_clock::now();

  StepState state{forward_transform(u0), SpectralField(n)};

  auto record = [&](long step) {
    InverseResult inv = inverse_transform_checked(state.u_hat);
    SnapshotStats s;
    s.imag_residue = inv.max_imag;
    bool finite = true;
    double sumsq = 0.0;
    s.min = inv.field.values.front();
    s.max = inv.field.values.front();
    for (double v : inv.field.values) {
      if (!std::isfinite(v)) finite = false;
      sumsq += v * v;
      s.min = std::min(s.min, v);
      s.max = std::max(s.max, v);
    }
    s.l2_norm = std::sqrt(sumsq);
    const double amax = std::max(std::abs(s.min), std::abs(s.max));
    traj.times.push_back(static_cast<double>(step) * config.dt);
    traj.steps.push_back(step);
    traj.snapshots.push_back(std::move(inv.field));
    traj.stats.push_back(s);
    if (!finite || amax > config.blowup_ceiling)
      traj.divergence = DivergenceInfo{step, amax, DivergenceInfo::Kind::blowup};
    else if (!(inv.max_imag < reality_threshold))
      traj.divergence = DivergenceInfo{step, inv.max_imag, DivergenceInfo::Kind::reality};
  };

  record(0);
  std::size_t next_save = 1;
  for (long step = 1; step <= n_time && !traj.divergence; ++step) {
    state = imex_step(std::move(state), config.dt, symbol, evaluator, coeffs);
    if (next_save < save_steps.size() && save_steps[next_save] == step) {
      record(step);
      ++next_save;
    }
  }

  traj.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return traj;
}

/// Time march from a caller-supplied start state with the evenly spaced
/// save schedule.
inline Trajectory run(const SolverConfig& config, const PhysicalField& u0) {
  config.validate();
  return run_with_save_steps(config, u0, save_schedule(config.step_count(), config.n_save));
}

/// Time march from the standard sinusoidal start state.
inline Trajectory run(const SolverConfig& config) {
  config.validate();
  return run(config, initial_condition(config.grid));
}

}  // namespace ks2d
