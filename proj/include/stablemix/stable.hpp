#pragma once

// Standard positive alpha-stable law S, E exp(-tS) = exp(-t^alpha), and the
// exponential-stable law of M = mu + sigma * log S.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stablemix/rng.hpp"

namespace stablemix {

/// Index of a standard positive stable law; alpha == 1 is the point mass at 1.
class StableLaw {
 public:
  explicit StableLaw(double alpha);

  double alpha() const { return alpha_; }
  bool degenerate() const { return alpha_ == 1.0; }

 private:
  double alpha_;
};

/// Parameters (alpha, mu, sigma) of ExpS, the law of mu + sigma log S.
class ExpSParams {
 public:
  ExpSParams(double alpha, double mu, double sigma);

  double alpha() const { return law_.alpha(); }
  double mu() const { return mu_; }
  double sigma() const { return sigma_; }
  const StableLaw& law() const { return law_; }

 private:
  StableLaw law_;
  double mu_;
  double sigma_;
};

struct Moments {
  double mean;
  double variance;
};

// Sampling (Kanter's representation of the one-sided stable law).
std::vector<double> sample_stable(const StableLaw& law, std::size_t n, std::uint64_t seed);
/// One draw of log S; never overflows even for tiny alpha.
double draw_log_stable(const StableLaw& law, Rng& rng);

// Evaluation for x in [1e-300, 1e300]; outside that range an out_of_range
// error is raised.
double stable_pdf(const StableLaw& law, double x);
double stable_log_pdf(const StableLaw& law, double x);
double stable_cdf(const StableLaw& law, double x);
/// Upper tail P(S > x), accurate far into the Pareto tail.
double stable_sf(const StableLaw& law, double x);
double stable_quantile(const StableLaw& law, double q);

/// c_alpha in P(S > x) ~ c_alpha x^-alpha.
double stable_tail_constant(double alpha);

double exps_pdf(const ExpSParams& p, double x);
double exps_log_pdf(const ExpSParams& p, double x);
double exps_cdf(const ExpSParams& p, double x);
double exps_sf(const ExpSParams& p, double x);
double exps_quantile(const ExpSParams& p, double q);
Moments exps_moments(const ExpSParams& p);

namespace detail {
// Same evaluations parameterized by y = log x, which is what ExpS needs.
double stable_log_pdf_at_log(double alpha, double log_x);
double stable_cdf_at_log(double alpha, double log_x);
double stable_sf_at_log(double alpha, double log_x);
double stable_quantile_log(double alpha, double q);
}  // namespace detail

}  // namespace stablemix
