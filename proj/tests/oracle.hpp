#pragma once

// Test-side reference values that do not go through the library: joint
// distribution functions written out directly in long double, and nested
// central finite differences of them.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

using Real = long double;
using Cdf = std::function<Real(const std::vector<Real>&)>;

/// d^n F / dx_1 ... dx_n by nested central differences with step h.
inline Real mixed_partial(const Cdf& f, const std::vector<Real>& x, Real h) {
  const std::size_t n = x.size();
  Real total = 0.0L;
  std::vector<Real> y(n);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    int sign = 1;
    for (std::size_t i = 0; i < n; ++i) {
      const bool up = (mask >> i) & 1U;
      y[i] = x[i] + (up ? h : -h);
      if (!up) sign = -sign;
    }
    total += sign * f(y);
  }
  return total / std::pow(2.0L * h, static_cast<Real>(n));
}

/// One Richardson step on the O(h^2) error of mixed_partial, pairing h with
/// 2h. Halving instead would lose too many digits to rounding at fourth order.
inline Real density(const Cdf& f, const std::vector<Real>& x, Real h) {
  const Real fine = mixed_partial(f, x, h);
  const Real coarse = mixed_partial(f, x, 2.0L * h);
  return (4.0L * fine - coarse) / 3.0L;
}

/// exp(-(sum_j exp(-(x_j - mu) / sigma))^alpha): one random-effects group.
inline Cdf random_effects_cdf(Real mu, Real sigma, Real alpha) {
  return [=](const std::vector<Real>& x) {
    Real s = 0.0L;
    for (Real v : x) s += std::exp(-(v - mu) / sigma);
    return std::exp(-std::pow(s, alpha));
  };
}

/// Hidden MA(1) with H_t = S_t + b S_{t-1}: mixing variable S_a enters
/// coordinates a and a + 1, so the cdf is
/// exp(-sum_{a=0}^{n} (z_a + b z_{a+1})^alpha) with z_0 = z_{n+1} = 0.
inline Cdf ma1_cdf(Real mu, Real b, Real sigma, Real alpha) {
  return [=](const std::vector<Real>& x) {
    const std::size_t n = x.size();
    std::vector<Real> z(n + 2, 0.0L);
    for (std::size_t t = 1; t <= n; ++t) z[t] = std::exp(-(x[t - 1] - mu) / sigma);
    Real s = 0.0L;
    for (std::size_t a = 0; a <= n; ++a) s += std::pow(z[a] + b * z[a + 1], alpha);
    return std::exp(-s);
  };
}

/// Random-effects group with GEV margins z = (1 + gamma (x - mu) / sigma)^(-1/gamma).
inline Cdf gev_random_effects_cdf(Real mu, Real sigma, Real gamma, Real alpha) {
  return [=](const std::vector<Real>& x) {
    Real s = 0.0L;
    for (Real v : x) s += std::pow(1.0L + gamma * (v - mu) / sigma, -1.0L / gamma);
    return std::exp(-std::pow(s, alpha));
  };
}

}  // namespace oracle
