#include "stablemix/likelihood.hpp"

#include <cmath>
#include <string>

#include "stablemix/error.hpp"
#include "stablemix/evd.hpp"
#include "stablemix/numeric.hpp"

namespace stablemix {

namespace {

void check_params(double sigma, double alpha) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    fail(ErrorCode::invalid_argument, "scale sigma must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorCode::invalid_argument, "alpha must lie in (0, 1]");
}

}  // namespace

DerivativeTable::DerivativeTable(std::size_t order, double alpha) : order_(order), alpha_(alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorCode::invalid_argument, "alpha must lie in (0, 1]");
  if (order == 0) return;
  log_a_.assign(1, std::log(alpha));
  std::vector<double> next;
  for (std::size_t n = 1; n < order; ++n) {
    next.assign(n + 1, kNegInf);
    for (std::size_t j = 1; j <= n + 1; ++j) {
      LogSumExp acc;
      if (j <= n) {
        const double w = static_cast<double>(n) - static_cast<double>(j) * alpha;
        if (w > 0.0) acc.add(std::log(w) + log_a_[j - 1]);
      }
      if (j >= 2) acc.add(std::log(alpha) + log_a_[j - 2]);
      next[j - 1] = acc.value();
    }
    log_a_.swap(next);
  }
  for (double v : log_a_)
    if (std::isnan(v) || v == kInf)
      fail(ErrorCode::capacity, "derivative coefficients overflow at n = " + std::to_string(order) +
                                    ", alpha = " + std::to_string(alpha));
}

double DerivativeTable::log_coefficient(std::size_t j) const {
  if (j == 0 || j > order_) return kNegInf;
  return log_a_[j - 1];
}

double DerivativeTable::log_value(double log_delta) const {
  if (std::isnan(log_delta) || std::isinf(log_delta))
    fail(ErrorCode::invalid_argument, "Delta must be positive and finite");
  const double power = std::exp(alpha_ * log_delta);
  if (order_ == 0) return -power;
  LogSumExp acc;
  const double n = static_cast<double>(order_);
  for (std::size_t j = 1; j <= order_; ++j)
    acc.add(log_a_[j - 1] + (static_cast<double>(j) * alpha_ - n) * log_delta);
  const double out = -power + acc.value();
  if (std::isnan(out) || out == kInf)
    fail(ErrorCode::capacity, "stable derivative overflow at n = " + std::to_string(order_));
  return out;
}

double log_stable_derivative(std::size_t n, double alpha, double log_delta) {
  return DerivativeTable(n, alpha).log_value(log_delta);
}

double stable_derivative(std::size_t n, double alpha, double delta) {
  if (!(delta > 0.0)) fail(ErrorCode::invalid_argument, "Delta must be positive");
  return std::exp(log_stable_derivative(n, alpha, std::log(delta)));
}

double re_group_loglik(const ReParams& p, std::span<const double> group) {
  check_params(p.sigma, p.alpha);
  if (group.empty()) fail(ErrorCode::invalid_argument, "empty group");
  CompensatedSum linear;
  LogSumExp log_delta;
  for (double x : group) {
    const double y = (x - p.mu) / p.sigma;
    linear.add(y);
    log_delta.add(-y);
  }
  const double n = static_cast<double>(group.size());
  return -n * std::log(p.sigma) - linear.value() +
         DerivativeTable(group.size(), p.alpha).log_value(log_delta.value());
}

double re_total_loglik(const ReParams& p, const GroupedSample& data) {
  if (data.groups.empty()) fail(ErrorCode::data, "no groups");
  CompensatedSum total;
  for (const auto& g : data.groups) total.add(re_group_loglik(p, g.values));
  return total.value();
}

double gev_re_group_loglik(const GevReParams& p, std::span<const double> group) {
  check_params(p.sigma, p.alpha);
  const GevParams margin(p.mu, p.sigma, p.gamma);
  if (group.empty()) fail(ErrorCode::invalid_argument, "empty group");
  CompensatedSum jacobian;
  LogSumExp log_delta;
  for (double x : group) {
    const double lz = gev_log_z(margin, x);
    if (std::isinf(lz)) fail(ErrorCode::invalid_argument, "observation outside the GEV support");
    jacobian.add((1.0 + p.gamma) * lz - std::log(p.sigma));
    log_delta.add(lz);
  }
  return jacobian.value() + DerivativeTable(group.size(), p.alpha).log_value(log_delta.value());
}

double ma1_loglik(const Ma1Params& p, std::span<const double> series) {
  check_params(p.sigma, p.alpha);
  if (!(p.b >= 0.0) || !std::isfinite(p.b)) fail(ErrorCode::invalid_argument, "b must be >= 0");
  if (p.alpha == 1.0 && p.b > 0.0)
    fail(ErrorCode::degenerate_law, "MA(1) likelihood with alpha = 1 and b > 0 is degenerate");
  const std::size_t n = series.size();
  if (n == 0) fail(ErrorCode::invalid_argument, "empty series");
  const double a = p.alpha;
  const double b = p.b;

  // log z_t, t = 1..n, and log u_t, t = 1..n+1 (index 0 unused).
  std::vector<double> log_z(n + 1);
  CompensatedSum linear;
  for (std::size_t t = 1; t <= n; ++t) {
    const double y = (series[t - 1] - p.mu) / p.sigma;
    linear.add(y);
    log_z[t] = -y;
  }
  const double log_b = b > 0.0 ? std::log(b) : kNegInf;
  std::vector<double> log_u(n + 2);
  log_u[1] = log_b + log_z[1];
  for (std::size_t t = 2; t <= n; ++t) {
    LogSumExp acc;
    acc.add(log_z[t - 1]);
    acc.add(log_b + log_z[t]);
    log_u[t] = acc.value();
  }
  log_u[n + 1] = log_z[n];

  CompensatedSum power;
  for (std::size_t t = 1; t <= n + 1; ++t)
    if (log_u[t] != kNegInf) power.add(std::exp(a * log_u[t]));

  // First-order term alpha (b u_i^(a-1) + u_{i+1}^(a-1)); the b-term is absent when b == 0.
  auto first = [&](std::size_t i) {
    double v = std::exp((a - 1.0) * log_u[i + 1]);
    if (b > 0.0) v += b * std::exp((a - 1.0) * log_u[i]);
    return a * v;
  };
  // Cross term -alpha (alpha - 1) b u_i^(a-2).
  auto cross = [&](std::size_t i) {
    return b > 0.0 ? -a * (a - 1.0) * b * std::exp((a - 2.0) * log_u[i]) : 0.0;
  };

  // Q_{i-1} and Q_i are stored relative to a shared scale exp(log_scale);
  // signs are carried by the mantissas.
  double q_prev = 1.0;
  double q_cur = first(1);
  double log_scale = 0.0;
  for (std::size_t i = 2; i <= n; ++i) {
    const double next = cross(i) * q_prev + first(i) * q_cur;
    q_prev = q_cur;
    q_cur = next;
    const double mag = std::abs(next);
    if (mag > 0.0 && (mag > 1e150 || mag < 1e-150)) {
      q_prev /= mag;
      q_cur /= mag;
      log_scale += std::log(mag);
    }
  }
  if (!(q_cur > 0.0) || !std::isfinite(q_cur))
    fail(ErrorCode::capacity, "MA(1) recursion produced a nonpositive or nonfinite Q_n");
  const double log_q = std::log(q_cur) + log_scale;
  return log_q - power.value() - linear.value() - static_cast<double>(n) * std::log(p.sigma);
}

}  // namespace stablemix
