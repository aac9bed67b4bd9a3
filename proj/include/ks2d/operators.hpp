#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ks2d/grid.hpp"
#include "ks2d/transform.hpp"

namespace ks2d {

/// Quartic part of the linear operator symbol: the source writes
/// k1^4 + k2^4, the full biharmonic is (k1^2 + k2^2)^2.
enum class OperatorMode { paper, full_biharmonic };

/// Wavenumber scaling. paper keeps raw integer wavenumbers in the linear
/// symbol and a 2*pi factor on nonlinear derivatives; physical applies the
/// consistent factor 2*pi/L_j = lx_j to both.
enum class ScalingMode { paper, physical };

/// Per-mode real multiplier of the stiff linear operator,
/// -(s1 k1)^2 - (s2 k2)^2 + quartic term.
struct LinearSymbol {
  int n = 0;
  OperatorMode operator_mode = OperatorMode::paper;
  ScalingMode scaling_mode = ScalingMode::paper;
  std::vector<double> lambda;

  double operator()(int i, int j) const { return lambda[static_cast<std::size_t>(i) * n + j]; }
};

inline LinearSymbol build_linear_symbol(const GridSpec& spec, OperatorMode operator_mode,
                                        ScalingMode scaling_mode) {
  spec.validate();
  const int n = spec.n;
  const std::vector<int> k = wavenumbers(n, WavenumberVariant::linear);
  const double s1 = scaling_mode == ScalingMode::paper ? 1.0 : spec.lx1;
  const double s2 = scaling_mode == ScalingMode::paper ? 1.0 : spec.lx2;
  LinearSymbol symbol;
  symbol.n = n;
  symbol.operator_mode = operator_mode;
  symbol.scaling_mode = scaling_mode;
  symbol.lambda.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double a = s1 * k[j];  // k1 runs along columns
      const double b = s2 * k[i];
      const double laplacian = a * a + b * b;
      const double quartic = operator_mode == OperatorMode::paper
                                 ? a * a * a * a + b * b * b * b
                                 : laplacian * laplacian;
      symbol.lambda[static_cast<std::size_t>(i) * n + j] = -laplacian + quartic;
    }
  return symbol;
}

/// Square two-thirds-rule low-pass region: keep |k1| <= cutoff and
/// |k2| <= cutoff with cutoff = floor(n/3).
struct DealiasMask {
  int n = 0;
  int cutoff = 0;
  std::vector<std::uint8_t> keep;

  bool kept(int i, int j) const { return keep[static_cast<std::size_t>(i) * n + j] != 0; }

  std::size_t kept_count() const {
    std::size_t count = 0;
    for (auto k : keep) count += k;
    return count;
  }
};

inline DealiasMask build_dealias_mask(const GridSpec& spec) {
  spec.validate();
  const int n = spec.n;
  const std::vector<int> k = wavenumbers(n, WavenumberVariant::linear);
  DealiasMask mask;
  mask.n = n;
  mask.cutoff = n / 3;
  mask.keep.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      mask.keep[static_cast<std::size_t>(i) * n + j] =
          std::abs(k[j]) <= mask.cutoff && std::abs(k[i]) <= mask.cutoff ? 1 : 0;
  return mask;
}

/// De-aliased pseudospectral evaluation of 1/2 (u_x1^2 + u_x2^2): mask the
/// input, differentiate per dimension in Fourier space on the Nyquist-zeroed
/// wavenumber grid, square and sum on the physical grid, transform back and
/// mask again. Coefficients outside the mask are exactly zero.
inline SpectralField nonlinear_term(const SpectralField& u_hat, const GridSpec& spec,
                                    const DealiasMask& mask, ScalingMode scaling_mode) {
  spec.validate();
  const int n = spec.n;
  if (u_hat.n != n || mask.n != n)
    throw std::invalid_argument("nonlinear_term: field/mask dimensions do not match the grid");

  const std::vector<int> k = wavenumbers(n, WavenumberVariant::nonlinear);
  const double f1 = scaling_mode == ScalingMode::paper ? 2.0 * pi : spec.lx1;
  const double f2 = scaling_mode == ScalingMode::paper ? 2.0 * pi : spec.lx2;

  SpectralField d1(n), d2(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::complex<double> masked = mask.kept(i, j) ? u_hat(i, j) : 0.0;
      d1(i, j) = std::complex<double>(0.0, f1 * k[j]) * masked;
      d2(i, j) = std::complex<double>(0.0, f2 * k[i]) * masked;
    }

  const PhysicalField v1 = inverse_transform(d1);
  const PhysicalField v2 = inverse_transform(d2);
  PhysicalField product(n);
  for (std::size_t m = 0; m < product.values.size(); ++m)
    product.values[m] = 0.5 * (v1.values[m] * v1.values[m] + v2.values[m] * v2.values[m]);

  SpectralField out = forward_transform(product);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!mask.kept(i, j)) out(i, j) = 0.0;
  return out;
}

}  // namespace ks2d
