#pragma once

// Exact log-likelihoods for the random-effects and hidden MA(1) models.
//
// Random effects: a group x_1..x_n has density
//   sigma^-n exp(-sum (x_j - mu) / sigma) E[S^n exp(-S Delta)],
// Delta = sum exp(-(x_j - mu) / sigma), and E[S^n exp(-S Delta)] equals
//   D_n(Delta) = (-1)^n d^n/dDelta^n exp(-Delta^alpha)
//              = exp(-Delta^alpha) sum_{j=1..n} a[n, j] Delta^(j alpha - n),
// with a[1, 1] = alpha and a[n+1, j] = (n - j alpha) a[n, j] + alpha a[n, j-1].
// Coefficients grow factorially in n / alpha, so they are kept as logs.

#include <cstddef>
#include <span>
#include <vector>

#include "stablemix/data.hpp"

namespace stablemix {

/// log a[n, j] for j = 1..n at a fixed order n and index alpha.
class DerivativeTable {
 public:
  DerivativeTable(std::size_t order, double alpha);

  std::size_t order() const { return order_; }
  double alpha() const { return alpha_; }
  /// log a[n, j]; -inf for coefficients that vanish (alpha == 1, j < n).
  double log_coefficient(std::size_t j) const;
  /// log D_n(Delta) given log Delta.
  double log_value(double log_delta) const;

 private:
  std::size_t order_;
  double alpha_;
  std::vector<double> log_a_;  // index j - 1
};

/// D_n(Delta); n = 0 gives exp(-Delta^alpha).
double stable_derivative(std::size_t n, double alpha, double delta);
double log_stable_derivative(std::size_t n, double alpha, double log_delta);

struct ReParams {
  double mu;
  double sigma;
  double alpha;
};

struct GevReParams {
  double mu;
  double sigma;
  double gamma;
  double alpha;
};

struct Ma1Params {
  double mu;
  double b;
  double sigma;
  double alpha;
};

double re_group_loglik(const ReParams& p, std::span<const double> group);
double re_total_loglik(const ReParams& p, const GroupedSample& data);

/// GEV analogue with z_j = (1 + gamma (x_j - mu) / sigma)^(-1/gamma):
/// sum_j [(1 + gamma) log z_j - log sigma] + log D_n(sum z_j).
double gev_re_group_loglik(const GevReParams& p, std::span<const double> group);

/// Hidden MA(1) with b_0 = 1, b_1 = b:
/// log L = log Q_n - sum_{t=1}^{n+1} u_t^alpha - sum (x_t - mu) / sigma - n log sigma.
double ma1_loglik(const Ma1Params& p, std::span<const double> series);

}  // namespace stablemix
