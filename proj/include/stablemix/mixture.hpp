#pragma once

// Positive-stable mixtures of Gumbel margins.
//
// A MixtureSpec holds a finite index set T (rows) and mixing index set A
// (columns) with nonnegative weights c[t, a]. With S_a i.i.d. standard
// positive alpha-stable and G_t ~ Gumbel(mu_t, sigma_t) independent,
//   X_t = G_t + sigma_t log(sum_a c[t, a] S_a)
// has joint distribution function
//   P(X_t <= x_t, t in T) = prod_a exp(-(sum_t c[t, a] z_t)^alpha),
//   z_t = exp(-(x_t - mu_t) / sigma_t).
// The concrete families (random effects, hidden MA / AR, spatial MA) are
// builders producing the coefficient matrix.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "stablemix/evd.hpp"

namespace stablemix {

class MixtureSpec {
 public:
  MixtureSpec(Eigen::MatrixXd coefficients, std::vector<double> mu, std::vector<double> sigma,
              double alpha);

  std::size_t dimension() const { return mu_.size(); }
  std::size_t mixing_size() const { return static_cast<std::size_t>(c_.cols()); }
  const Eigen::MatrixXd& coefficients() const { return c_; }
  std::span<const double> mu() const { return mu_; }
  std::span<const double> sigma() const { return sigma_; }
  double alpha() const { return alpha_; }

  /// True when every sigma_t equals sigma_0 (required for max distributions).
  bool common_scale() const;

 private:
  Eigen::MatrixXd c_;
  std::vector<double> mu_;
  std::vector<double> sigma_;
  double alpha_;
};

/// Joint cdf; +inf coordinates drop out (marginalization), -inf gives 0.
double joint_cdf(const MixtureSpec& spec, std::span<const double> x);
double log_joint_cdf(const MixtureSpec& spec, std::span<const double> x);

/// -sum_a (sum_t c[t, a] z_t)^alpha from log z_t; log z_t = -inf drops the
/// term, +inf yields -inf. Shared by the Gumbel and GEV evaluators.
double log_joint_cdf_from_log_z(const Eigen::MatrixXd& c, double alpha,
                                std::span<const double> log_z);

/// Law of max_{t in subset} X_t; requires a common scale.
GumbelParams max_distribution(const MixtureSpec& spec, std::span<const std::size_t> subset);

/// P(max_{T1} X <= x1, max_{T2} X <= x2) for disjoint T1, T2 under a common scale.
double joint_max_cdf(const MixtureSpec& spec, std::span<const std::size_t> first,
                     std::span<const std::size_t> second, double x1, double x2);

// ---------------------------------------------------------------------------
// Model families

/// X_ij = mu + tau_i + G_ij, tau_i ~ ExpS(alpha, 0, sigma), G_ij ~ Gumbel(0, sigma).
struct RandomEffectsSpec {
  double mu = 0.0;
  double sigma = 1.0;
  double alpha = 1.0;
  std::vector<std::size_t> group_sizes;
};

/// Hidden MA(q): H_t = sum_k b_k S_{t-k}, X_t = mu_t + sigma log H_t + G_t, t = 1..n.
struct HiddenMaSpec {
  std::vector<double> mu;  // one entry per time point
  double sigma = 1.0;
  double alpha = 1.0;
  std::vector<double> b{1.0};  // b_0 .. b_q
};

/// Hidden stationary AR(1): H_t = sum_{i >= 0} rho^i S_{t-i}, time points t = 0..n.
struct HiddenArSpec {
  std::vector<double> mu;  // one entry per time point, starting at t = 0
  double sigma = 1.0;
  double alpha = 1.0;
  double rho = 0.5;
};

struct GridOffset {
  int di;
  int dj;
  friend bool operator==(const GridOffset&, const GridOffset&) = default;
};

/// Neighborhood of (i, j) is {(i + di, j + dj)}; must contain (0, 0) and be
/// closed under negation.
using Neighborhood = std::vector<GridOffset>;

/// The point itself and its four nearest lattice neighbours.
Neighborhood cross_neighborhood();

/// Spatial hidden MA on an n x n grid: H_ij = delta * sum_{(k,l) in N(i,j)} S_kl.
struct SpatialMaSpec {
  std::size_t n = 1;
  double delta = 1.0;
  std::vector<double> mu{0.0};  // n*n row-major entries, or a single constant
  double sigma = 1.0;
  double alpha = 1.0;
  Neighborhood neighborhood = cross_neighborhood();
};

/// Two-layer nested logistic model X_ijk = mu + tau_i + eta_ij + G_ijk.
/// shape[i][j] = r_ij, the number of observations in subgroup (i, j).
/// Coordinates are ordered lexicographically by (i, j, k).
struct HierarchicalSpec {
  double mu = 0.0;
  double sigma = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  std::vector<std::vector<std::size_t>> shape;

  std::size_t dimension() const;
};

MixtureSpec build_random_effects(const RandomEffectsSpec& spec);
MixtureSpec build_hidden_ma(const HiddenMaSpec& spec);
MixtureSpec build_hidden_ar(const HiddenArSpec& spec);
MixtureSpec build_spatial_ma(const SpatialMaSpec& spec);

/// prod_i exp(-{sum_j (sum_k z_ijk)^alpha}^beta).
double hierarchical_cdf(const HierarchicalSpec& spec, std::span<const double> x);

/// Exact simulation; one row per replicate. Replicates are drawn from
/// partitioned seed streams, so results do not depend on batching.
Eigen::MatrixXd simulate(const MixtureSpec& spec, std::size_t replicates, std::uint64_t seed);
Eigen::MatrixXd simulate(const HierarchicalSpec& spec, std::size_t replicates, std::uint64_t seed);

// ---------------------------------------------------------------------------
// GEV translation: z_t = (1 + gamma_t (x_t - mu_t) / sigma_t)^(-1/gamma_t).

struct GevMixtureSpec {
  MixtureSpec base;
  std::vector<double> gamma;  // per-margin shape, nonzero

  GevParams margin(std::size_t t) const;
};

GevMixtureSpec gev_translate(const MixtureSpec& spec, double gamma);
double gev_joint_cdf(const GevMixtureSpec& spec, std::span<const double> x);

/// X_t = delta_t + H_t^gamma (E_t - delta_t) with H_t = sum_a c[t, a] S_a and
/// E_t ~ GEV(mu_t, sigma_t, gamma_t).
Eigen::MatrixXd gev_simulate(const GevMixtureSpec& spec, std::size_t replicates,
                             std::uint64_t seed);

}  // namespace stablemix
