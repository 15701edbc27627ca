#pragma once

// Univariate Gumbel and generalized extreme value (GEV) laws.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stablemix/rng.hpp"

namespace stablemix {

/// Gumbel(mu, sigma): F(x) = exp(-exp(-(x - mu) / sigma)).
struct GumbelParams {
  GumbelParams(double mu, double sigma);

  double mu;
  double sigma;
};

/// GEV(mu, sigma, gamma) with gamma != 0: F(x) = exp(-(1 + gamma (x - mu) / sigma)^(-1/gamma)).
/// The gamma == 0 member is GumbelParams.
struct GevParams {
  GevParams(double mu, double sigma, double gamma);

  /// Finite endpoint mu - sigma / gamma (left when gamma > 0, right when gamma < 0).
  double endpoint() const { return mu - sigma / gamma; }

  double mu;
  double sigma;
  double gamma;
};

double gumbel_pdf(const GumbelParams& p, double x);
double gumbel_log_pdf(const GumbelParams& p, double x);
double gumbel_cdf(const GumbelParams& p, double x);
double gumbel_quantile(const GumbelParams& p, double q);
double gumbel_draw(const GumbelParams& p, Rng& rng);
std::vector<double> gumbel_sample(const GumbelParams& p, std::size_t n, std::uint64_t seed);

/// log of the "z" term, -log(1 + gamma y) / gamma with y = (x - mu) / sigma;
/// +inf below a left endpoint and -inf above a right endpoint.
double gev_log_z(const GevParams& p, double x);
double gev_pdf(const GevParams& p, double x);
double gev_log_pdf(const GevParams& p, double x);
double gev_cdf(const GevParams& p, double x);
double gev_quantile(const GevParams& p, double q);
double gev_draw(const GevParams& p, Rng& rng);
std::vector<double> gev_sample(const GevParams& p, std::size_t n, std::uint64_t seed);

/// Probability-weighted-moment estimate of Gumbel parameters:
/// sigma = (2 b1 - b0) / log 2, mu = b0 - euler_gamma * sigma with the
/// unbiased b1 = (1/n) sum ((i-1)/(n-1)) x_(i).
GumbelParams pwm_fit_gumbel(std::span<const double> data);

struct PlotPoint {
  double x;
  double y;
};

/// Gumbel probability plot: sorted data against -log(-log p_i), p_i = (i - 0.5) / n.
std::vector<PlotPoint> gumbel_plot_coords(std::span<const double> data);

}  // namespace stablemix
