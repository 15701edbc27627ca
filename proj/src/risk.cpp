#include "stablemix/risk.hpp"

#include <algorithm>
#include <cmath>

#include "stablemix/error.hpp"
#include "stablemix/numeric.hpp"

namespace stablemix {

namespace {

void validate(const RiskQuery& q) {
  require(q.m >= 1.0 && std::isfinite(q.m), "m must be >= 1");
  require(q.n >= 1.0 && std::isfinite(q.n), "n must be >= 1");
  require(!std::isnan(q.threshold), "threshold must be a number");
  require(std::isfinite(q.mu), "mu must be finite");
  require(q.sigma > 0.0 && std::isfinite(q.sigma), "sigma must be positive");
  require(q.alpha > 0.0 && q.alpha <= 1.0, "alpha must lie in (0, 1]");
}

}  // namespace

RiskResult risk_return_period(const RiskQuery& q) {
  validate(q);
  // log F = -exp(log m + alpha (log n - (x - mu) / sigma))
  const double e = std::log(q.m) + q.alpha * (std::log(q.n) - (q.threshold - q.mu) / q.sigma);
  const double log_f = -std::exp(e);
  const double exceed = -std::expm1(log_f);
  RiskResult r;
  r.cdf = std::exp(log_f);
  r.infinite = !(exceed > 0.0);
  r.return_period = r.infinite ? kInf : 1.0 / exceed;
  return r;
}

Interval return_period_interval(const RiskQuery& query, const FitResult& fit, double level) {
  if (fit.model != "random_effects")
    fail(ErrorCode::invalid_argument, "return-period intervals need a random-effects fit");
  const std::size_t im = fit.index_of("mu");
  const std::size_t is = fit.index_of("sigma");
  const std::size_t ia = fit.index_of("alpha");
  auto g = [&](std::span<const double> t) {
    RiskQuery q = query;
    q.mu = t[im];
    q.sigma = t[is];
    q.alpha = std::min(t[ia], 1.0);
    return risk_return_period(q).return_period;
  };
  return delta_method_interval(g, fit, level);
}

}  // namespace stablemix
