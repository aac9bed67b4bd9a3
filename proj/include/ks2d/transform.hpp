#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "ks2d/grid.hpp"

namespace ks2d {

namespace detail {

// Process-wide cache of FFTW plans, one forward/backward pair per grid size.
// Plan creation is serialized (the FFTW planner is not thread-safe); plans
// are executed through the new-array interface, which is reentrant. Plans are
// created with FFTW_ESTIMATE so repeated runs pick identical algorithms.
class FftPlanCache {
 public:
  struct Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
  };

  static FftPlanCache& instance() {
    static FftPlanCache cache;
    return cache;
  }

  Plans plans_for(int n) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;

    std::vector<std::complex<double>> a(static_cast<std::size_t>(n) * n);
    std::vector<std::complex<double>> b(a.size());
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b.data());
    Plans p;
    p.forward = fftw_plan_dft_2d(n, n, pa, pb, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.backward = fftw_plan_dft_2d(n, n, pa, pb, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(n, p);
    return p;
  }

  FftPlanCache(const FftPlanCache&) = delete;
  FftPlanCache& operator=(const FftPlanCache&) = delete;

 private:
  FftPlanCache() = default;
  ~FftPlanCache() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
  }

  std::mutex mutex_;
  std::map<int, Plans> plans_;
};

inline void execute_dft(fftw_plan plan, const std::complex<double>* in, std::complex<double>* out) {
  // Out-of-place c2c transforms leave the input untouched.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace detail

/// Unnormalized forward 2-D DFT of a real field.
inline SpectralField forward_transform(const PhysicalField& u) {
  if (u.n < 1 || u.values.size() != static_cast<std::size_t>(u.n) * u.n)
    throw std::invalid_argument("forward_transform: field dimensions are inconsistent");
  const int n = u.n;
  std::vector<std::complex<double>> in(u.values.size());
  for (std::size_t m = 0; m < in.size(); ++m) in[m] = u.values[m];
  SpectralField out(n);
  auto plans = detail::FftPlanCache::instance().plans_for(n);
  detail::execute_dft(plans.forward, in.data(), out.coeffs.data());
  return out;
}

/// Unnormalized forward 2-D DFT of complex data (used by resampling).
inline SpectralField forward_transform_complex(const SpectralField& u) {
  if (u.n < 1 || u.coeffs.size() != static_cast<std::size_t>(u.n) * u.n)
    throw std::invalid_argument("forward_transform: field dimensions are inconsistent");
  SpectralField out(u.n);
  auto plans = detail::FftPlanCache::instance().plans_for(u.n);
  detail::execute_dft(plans.forward, u.coeffs.data(), out.coeffs.data());
  return out;
}

struct InverseResult {
  PhysicalField field;
  double max_imag = 0.0;  // largest |imaginary part| discarded, post-normalization
};

/// Inverse 2-D DFT (divides by n^2) that reports the largest imaginary
/// residue discarded when projecting back to a real field.
inline InverseResult inverse_transform_checked(const SpectralField& u_hat) {
  if (u_hat.n < 1 || u_hat.coeffs.size() != static_cast<std::size_t>(u_hat.n) * u_hat.n)
    throw std::invalid_argument("inverse_transform: field dimensions are inconsistent");
  const int n = u_hat.n;
  std::vector<std::complex<double>> out(u_hat.coeffs.size());
  auto plans = detail::FftPlanCache::instance().plans_for(n);
  detail::execute_dft(plans.backward, u_hat.coeffs.data(), out.data());
  const double scale = 1.0 / (static_cast<double>(n) * n);
  InverseResult result;
  result.field = PhysicalField(n);
  for (std::size_t m = 0; m < out.size(); ++m) {
    result.field.values[m] = out[m].real() * scale;
    result.max_imag = std::max(result.max_imag, std::abs(out[m].imag() * scale));
  }
  return result;
}

/// Inverse 2-D DFT; imaginary parts are discarded.
inline PhysicalField inverse_transform(const SpectralField& u_hat) {
  return inverse_transform_checked(u_hat).field;
}

/// Largest conjugate-symmetry defect |c(k) - conj(c(-k))| relative to the
/// largest coefficient magnitude. Zero (up to rounding) for spectra of real
/// fields.
inline double conjugate_asymmetry(const SpectralField& u_hat) {
  const int n = u_hat.n;
  double scale = 0.0;
  for (const auto& c : u_hat.coeffs) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::complex<double> mirror = u_hat((n - i) % n, (n - j) % n);
      worst = std::max(worst, std::abs(u_hat(i, j) - std::conj(mirror)));
    }
  return worst / scale;
}

}  // namespace ks2d
