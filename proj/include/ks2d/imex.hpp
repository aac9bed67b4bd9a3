#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include "ks2d/errors.hpp"
#include "ks2d/grid.hpp"
#include "ks2d/operators.hpp"

namespace ks2d {

/// The 16 weights of the four-substage implicit-explicit Runge-Kutta step,
/// evaluated from exact integer ratios so the consistency sums hold to
/// rounding level.
struct ImexCoefficients {
  std::array<double, 4> alpha_implicit;
  std::array<double, 4> beta_implicit;
  std::array<double, 4> alpha_explicit;
  std::array<double, 4> beta_explicit;
};

inline ImexCoefficients tabulated_coefficients() {
  return ImexCoefficients{
      {343038331393.0 / 1130875731271.0, 288176579239.0 / 1140253497719.0,
       253330171251.0 / 677500478386.0, 189462239225.0 / 1091147436423.0},
      {35965327958.0 / 140127563663.0, 19632212512.0 / 2700543775099.0,
       -173747147147.0 / 351772688865.0, 91958533623.0 / 727726057489.0},
      {14.0 / 25.0, 777974228744.0 / 1346157007247.0, 251277807242.0 / 1103637129625.0,
       113091689455.0 / 220187950967.0},
      {0.0, -251352885992.0 / 790610919619.0, -383714262797.0 / 1103637129625.0,
       -403360439203.0 / 1888264787188.0}};
}

/// Solution state carried between steps: the current spectrum plus the most
/// recent nonlinear evaluation, which the next substage's lagged explicit
/// term reuses.
struct StepState {
  SpectralField u_hat;
  SpectralField prev_nonlinear;
};

/// One four-substage step. Substage s solves, mode by mode,
///   u_new = [(1 - dt*betaI_s*lambda) u - dt*alphaE_s*N(u)
///            - dt*betaE_s*N_prev] / (1 + dt*alphaI_s*lambda)
/// where N_prev is the nonlinear evaluation carried from the previous
/// substage (unused in substage 1, whose betaE is exactly zero). The
/// evaluator must map a spectrum to the nonlinear term's spectrum.
template <typename NonlinearFn>
StepState imex_step(StepState state, double dt, const LinearSymbol& symbol,
                    NonlinearFn&& nonlinear, const ImexCoefficients& coeffs) {
  if (!(dt > 0.0)) throw config_error("dt: time step must be positive");
  const int n = state.u_hat.n;
  if (symbol.n != n || state.prev_nonlinear.n != n)
    throw std::invalid_argument("imex_step: state/symbol dimensions do not match");

  const std::size_t count = state.u_hat.coeffs.size();
  SpectralField next(n);
  for (int s = 0; s < 4; ++s) {
    const double a_im = coeffs.alpha_implicit[s];
    const double b_im = coeffs.beta_implicit[s];
    const double a_ex = coeffs.alpha_explicit[s];
    const double b_ex = coeffs.beta_explicit[s];

    SpectralField fresh = nonlinear(state.u_hat);
    if (fresh.n != n) throw std::invalid_argument("imex_step: evaluator returned wrong size");

    for (std::size_t m = 0; m < count; ++m) {
      const double lambda = symbol.lambda[m];
      const double denom = 1.0 + dt * a_im * lambda;
      if (denom == 0.0)
        throw config_error("singular implicit solve: 1 + dt*alpha_I*lambda vanishes (dt = " +
                           std::to_string(dt) + ", lambda = " + std::to_string(lambda) + ")");
      std::complex<double> num =
          (1.0 - dt * b_im * lambda) * state.u_hat.coeffs[m] - dt * a_ex * fresh.coeffs[m];
      if (b_ex != 0.0) num -= dt * b_ex * state.prev_nonlinear.coeffs[m];
      next.coeffs[m] = num / denom;
    }
    state.u_hat.coeffs.swap(next.coeffs);
    state.prev_nonlinear = std::move(fresh);
  }
  return state;
}

}  // namespace ks2d
