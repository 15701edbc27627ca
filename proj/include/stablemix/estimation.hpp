#pragma once

// Maximum-likelihood fitting of the random-effects and hidden MA(1) models,
// observed information, delta-method intervals and likelihood-ratio tests.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stablemix/data.hpp"
#include "stablemix/evd.hpp"
#include "stablemix/optimize.hpp"

namespace stablemix {

// ---------------------------------------------------------------------------
// Parameter transforms

enum class ParamKind {
  real,      // identity
  positive,  // exp(u)
  index,     // alpha = lo + (hi - lo) / (1 + exp(-u)), see kAlphaLower/Upper
};

inline constexpr double kAlphaLower = 0.02;
inline constexpr double kAlphaUpper = 0.995;

class ParameterTransform {
 public:
  explicit ParameterTransform(std::vector<ParamKind> kinds) : kinds_(std::move(kinds)) {}

  std::size_t size() const { return kinds_.size(); }
  std::span<const ParamKind> kinds() const { return kinds_; }

  std::vector<double> to_natural(std::span<const double> u) const;
  /// Throws invalid_argument for values outside the open parameter region.
  std::vector<double> to_unconstrained(std::span<const double> theta) const;
  /// Diagonal of d theta / d u.
  std::vector<double> jacobian(std::span<const double> u) const;

 private:
  std::vector<ParamKind> kinds_;
};

// ---------------------------------------------------------------------------
// Results

struct DerivedValue {
  std::string name;
  double value;
  double std_error;  // NaN when no covariance
};

struct FitResult {
  std::string model;
  std::vector<std::string> names;
  std::vector<double> estimates;
  double loglik = 0.0;
  double initial_loglik = 0.0;
  /// Empty when the covariance could not be formed.
  std::vector<double> std_errors;
  std::optional<Eigen::MatrixXd> covariance;
  std::vector<DerivedValue> derived;
  bool converged = false;
  std::size_t n_starts_used = 0;
  std::size_t best_start = 0;
  std::size_t evaluations = 0;
  std::size_t n_observations = 0;
  std::vector<std::string> warnings;

  /// Index of a named parameter; throws invalid_argument when missing.
  std::size_t index_of(const std::string& name) const;
  double estimate(const std::string& name) const { return estimates[index_of(name)]; }
};

struct FitOptions {
  /// Total starting points for multi-start fits (the default start included).
  std::size_t starts = 20;
  std::uint64_t seed = 1;
  /// Simplex evaluation cap per start; 0 means max(2000, 400 * parameters).
  std::size_t max_evaluations = 0;
  double tolerance = 1e-8;
  /// MA(1) default start uses sigma = factor * sigma0 (0.5 or 2 are the usual choices).
  double ma1_sigma_start_factor = 0.5;
  /// Fit the MA(1) model on the boundary b = 0 (independent series).
  bool ma1_fix_b_zero = false;
  bool compute_covariance = true;
};

// ---------------------------------------------------------------------------
// Information and tests

struct Information {
  /// Negative Hessian on the unconstrained scale.
  Eigen::MatrixXd negative_hessian;
  /// Natural-scale covariance; absent when the negative Hessian is not positive definite.
  std::optional<Eigen::MatrixXd> covariance;
  std::string warning;
};

/// Observed information of `loglik` (a function of natural parameters) at
/// theta_hat: central-difference Hessian in the unconstrained coordinates of
/// `transform`, inverted with an eigenvalue floor of 1e-12 * trace and mapped
/// back by the transform Jacobian. `scales` sets the finite-difference step
/// per unconstrained coordinate (1e-3 * scale); empty means max(1, |u_i|).
Information observed_information(const Objective& loglik, std::span<const double> theta_hat,
                                 const ParameterTransform& transform,
                                 std::span<const double> scales = {});

struct Interval {
  double estimate;
  double lower;
  double upper;
  double std_error;
};

/// g(theta) +- z * sqrt(grad' Sigma grad), grad by central differences.
Interval delta_method_interval(const std::function<double(std::span<const double>)>& g,
                               const FitResult& fit, double level = 0.95);

struct LrtResult {
  double statistic;
  double df;
  double p_value;
};

LrtResult likelihood_ratio_test(double loglik_full, double loglik_reduced, double df);

// ---------------------------------------------------------------------------
// Model fits

/// Random effects: parameters (mu, sigma, alpha); derived sigma_star = sigma / alpha.
FitResult fit_random_effects(const GroupedSample& data, const FitOptions& options = {});

/// Hidden MA(1): parameters mu_<series key> per series, then b, sigma, alpha.
FitResult fit_ma1(const SeriesSample& data, const FitOptions& options = {});

/// Gumbel maximum likelihood for one sample (profile over sigma).
GumbelParams gumbel_mle(std::span<const double> data);

struct ConditionalModels {
  FitResult separate;      // mu_i, sigma_i per group
  FitResult common_sigma;  // mu_i per group, one sigma
  FitResult pooled;        // one (mu, sigma)
  std::optional<LrtResult> separate_vs_common;
  LrtResult common_vs_pooled;
  std::vector<std::string> flags;
};

/// The three nested conditional Gumbel models fitted by direct MLE.
ConditionalModels fit_conditional_gumbel_models(const GroupedSample& data);

}  // namespace stablemix
