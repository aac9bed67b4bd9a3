#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ks2d/errors.hpp"

namespace ks2d {

inline constexpr double pi = 3.14159265358979323846;

/// Square periodic domain [0, 2*pi/lx1) x [0, 2*pi/lx2) sampled on an
/// n-by-n grid. Smaller length-scale parameters mean a longer box.
struct GridSpec {
  int n = 0;
  double lx1 = 1.0;
  double lx2 = 1.0;

  double length1() const { return 2.0 * pi / lx1; }
  double length2() const { return 2.0 * pi / lx2; }

  void validate() const {
    if (n < 4 || n % 2 != 0)
      throw config_error("n: grid size must be even and >= 4, got " + std::to_string(n));
    if (!std::isfinite(lx1) || lx1 <= 0.0)
      throw config_error("lx1: length-scale parameter must be positive and finite");
    if (!std::isfinite(lx2) || lx2 <= 0.0)
      throw config_error("lx2: length-scale parameter must be positive and finite");
  }

  bool operator==(const GridSpec&) const = default;
};

/// Real grid samples. Row index i walks the x2 direction, column index j
/// walks x1, so entry (i, j) sits at (j*L1/n, i*L2/n).
struct PhysicalField {
  int n = 0;
  std::vector<double> values;

  PhysicalField() = default;
  explicit PhysicalField(int size)
      : n(size), values(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0.0) {}

  double& operator()(int i, int j) { return values[static_cast<std::size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return values[static_cast<std::size_t>(i) * n + j]; }

  std::size_t size() const { return values.size(); }
};

/// Complex Fourier coefficients in standard DFT layout per dimension
/// (wavenumbers 0, 1, ..., n/2, -n/2+1, ..., -1). Same (i, j) indexing as
/// PhysicalField: i holds k2, j holds k1.
struct SpectralField {
  int n = 0;
  std::vector<std::complex<double>> coeffs;

  SpectralField() = default;
  explicit SpectralField(int size)
      : n(size), coeffs(static_cast<std::size_t>(size) * static_cast<std::size_t>(size)) {}

  std::complex<double>& operator()(int i, int j) {
    return coeffs[static_cast<std::size_t>(i) * n + j];
  }
  const std::complex<double>& operator()(int i, int j) const {
    return coeffs[static_cast<std::size_t>(i) * n + j];
  }

  std::size_t size() const { return coeffs.size(); }
};

enum class WavenumberVariant { linear, nonlinear };

/// One dimension of the DFT ordering 0, 1, ..., n/2, -n/2+1, ..., -1.
/// The nonlinear variant zeroes the Nyquist slot, whose sign is ambiguous
/// under odd-order differentiation; the linear variant keeps +n/2.
inline std::vector<int> wavenumbers(int n, WavenumberVariant variant) {
  std::vector<int> k(static_cast<std::size_t>(n));
  for (int j = 0; j <= n / 2; ++j) k[j] = j;
  for (int j = n / 2 + 1; j < n; ++j) k[j] = j - n;
  if (variant == WavenumberVariant::nonlinear) k[n / 2] = 0;
  return k;
}

/// Full n-by-n integer wavenumber grids; k2 is the transpose of k1.
struct WavenumberGrid {
  int n = 0;
  WavenumberVariant variant = WavenumberVariant::linear;
  std::vector<int> k1;
  std::vector<int> k2;

  int k1_at(int i, int j) const { return k1[static_cast<std::size_t>(i) * n + j]; }
  int k2_at(int i, int j) const { return k2[static_cast<std::size_t>(i) * n + j]; }
};

inline WavenumberGrid build_wavenumber_grid(const GridSpec& spec, WavenumberVariant variant) {
  spec.validate();
  const int n = spec.n;
  const std::vector<int> line = wavenumbers(n, variant);
  WavenumberGrid grid;
  grid.n = n;
  grid.variant = variant;
  grid.k1.resize(static_cast<std::size_t>(n) * n);
  grid.k2.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      grid.k1[static_cast<std::size_t>(i) * n + j] = line[j];
      grid.k2[static_cast<std::size_t>(i) * n + j] = line[i];
    }
  return grid;
}

/// Coordinate matrices of the periodic grid; the right/top endpoints are
/// excluded (identified with 0 by periodicity).
inline std::pair<PhysicalField, PhysicalField> build_physical_grid(const GridSpec& spec) {
  spec.validate();
  const int n = spec.n;
  const double h1 = spec.length1() / n;
  const double h2 = spec.length2() / n;
  PhysicalField x1(n), x2(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      x1(i, j) = j * h1;
      x2(i, j) = i * h2;
    }
  return {std::move(x1), std::move(x2)};
}

}  // namespace ks2d
