#include "stablemix/evd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stablemix/error.hpp"
#include "stablemix/numeric.hpp"

namespace stablemix {

namespace {

void check_level(double q) {
  if (!(q > 0.0 && q < 1.0)) fail(ErrorCode::invalid_argument, "quantile level must lie in (0, 1)");
}

}  // namespace

GumbelParams::GumbelParams(double mu_, double sigma_) : mu(mu_), sigma(sigma_) {
  if (!std::isfinite(mu)) fail(ErrorCode::invalid_argument, "Gumbel location must be finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    fail(ErrorCode::invalid_argument, "Gumbel scale must be positive");
}

GevParams::GevParams(double mu_, double sigma_, double gamma_) : mu(mu_), sigma(sigma_), gamma(gamma_) {
  if (!std::isfinite(mu)) fail(ErrorCode::invalid_argument, "GEV location must be finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    fail(ErrorCode::invalid_argument, "GEV scale must be positive");
  if (gamma == 0.0 || !std::isfinite(gamma))
    fail(ErrorCode::invalid_argument, "GEV shape must be finite and nonzero; use GumbelParams for 0");
}

double gumbel_log_pdf(const GumbelParams& p, double x) {
  const double y = (x - p.mu) / p.sigma;
  return -y - std::exp(-y) - std::log(p.sigma);
}

double gumbel_pdf(const GumbelParams& p, double x) { return std::exp(gumbel_log_pdf(p, x)); }

double gumbel_cdf(const GumbelParams& p, double x) {
  return std::exp(-std::exp(-(x - p.mu) / p.sigma));
}

double gumbel_quantile(const GumbelParams& p, double q) {
  check_level(q);
  return p.mu - p.sigma * std::log(-std::log(q));
}

double gumbel_draw(const GumbelParams& p, Rng& rng) {
  return p.mu - p.sigma * std::log(-std::log(rng.uniform()));
}

std::vector<double> gumbel_sample(const GumbelParams& p, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = gumbel_draw(p, rng);
  return out;
}

double gev_log_z(const GevParams& p, double x) {
  const double t = p.gamma * (x - p.mu) / p.sigma;
  if (!(t > -1.0)) return p.gamma > 0.0 ? kInf : kNegInf;
  return -std::log1p(t) / p.gamma;
}

double gev_log_pdf(const GevParams& p, double x) {
  const double lz = gev_log_z(p, x);
  if (std::isinf(lz)) return kNegInf;
  // f = z^(1+gamma) exp(-z) / sigma
  return (1.0 + p.gamma) * lz - std::exp(lz) - std::log(p.sigma);
}

double gev_pdf(const GevParams& p, double x) { return std::exp(gev_log_pdf(p, x)); }

double gev_cdf(const GevParams& p, double x) { return std::exp(-std::exp(gev_log_z(p, x))); }

double gev_quantile(const GevParams& p, double q) {
  check_level(q);
  return p.mu + p.sigma * std::expm1(-p.gamma * std::log(-std::log(q))) / p.gamma;
}

double gev_draw(const GevParams& p, Rng& rng) {
  return p.mu + p.sigma * std::expm1(-p.gamma * std::log(-std::log(rng.uniform()))) / p.gamma;
}

std::vector<double> gev_sample(const GevParams& p, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = gev_draw(p, rng);
  return out;
}

GumbelParams pwm_fit_gumbel(std::span<const double> data) {
  const std::size_t n = data.size();
  if (n < 2) fail(ErrorCode::data, "PWM fit needs at least two observations");
  std::vector<double> x(data.begin(), data.end());
  std::sort(x.begin(), x.end());
  CompensatedSum b0, b1;
  for (std::size_t i = 0; i < n; ++i) {
    b0.add(x[i]);
    b1.add(static_cast<double>(i) / static_cast<double>(n - 1) * x[i]);
  }
  const double m0 = b0.value() / static_cast<double>(n);
  const double m1 = b1.value() / static_cast<double>(n);
  const double sigma = (2.0 * m1 - m0) / std::numbers::ln2;
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    fail(ErrorCode::data, "degenerate sample: PWM scale estimate is not positive");
  return {m0 - kEulerGamma * sigma, sigma};
}

std::vector<PlotPoint> gumbel_plot_coords(std::span<const double> data) {
  std::vector<double> x(data.begin(), data.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  std::vector<PlotPoint> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = (static_cast<double>(i) + 0.5) / n;
    out.push_back({x[i], -std::log(-std::log(p))});
  }
  return out;
}

}  // namespace stablemix
