#pragma once

// Tail-risk extrapolation: probability that none of m groups of n blocks
// exceeds a threshold, and the corresponding return period.

#include <optional>

#include "stablemix/estimation.hpp"

namespace stablemix {

struct RiskQuery {
  double m = 1.0;
  double n = 1.0;
  double threshold = 0.0;
  double mu = 0.0;
  double sigma = 1.0;
  double alpha = 1.0;
};

struct RiskResult {
  double cdf;
  /// 1 / (1 - cdf); +inf when cdf rounds to 1.
  double return_period;
  bool infinite;
};

/// F(x) = exp(-m (n exp(-(x - mu) / sigma))^alpha).
RiskResult risk_return_period(const RiskQuery& query);

/// Delta-method interval for the return period at the fitted (mu, sigma, alpha).
/// Uses query.m, query.n and query.threshold; the parameters come from `fit`.
Interval return_period_interval(const RiskQuery& query, const FitResult& fit, double level = 0.95);

}  // namespace stablemix
