#include "stablemix/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "stablemix/error.hpp"
#include "stablemix/numeric.hpp"
#include "stablemix/stable.hpp"

namespace stablemix {

namespace {

constexpr std::size_t kReplicateBlock = 1024;

void check_index(double alpha, const char* name) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    fail(ErrorCode::invalid_argument, std::string(name) + " must lie in (0, 1]");
}

void check_scale(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    fail(ErrorCode::invalid_argument, "scale sigma must be positive and finite");
}

void check_dimension(std::size_t got, std::size_t want) {
  if (got != want)
    fail(ErrorCode::invalid_argument, "expected " + std::to_string(want) +
                                          " coordinates, got " + std::to_string(got));
}

// log z_t = -(x_t - mu_t) / sigma_t, with the infinite cases spelled out.
double gumbel_log_z(double x, double mu, double sigma) {
  if (std::isnan(x)) fail(ErrorCode::invalid_argument, "NaN coordinate");
  if (x == kInf) return kNegInf;
  if (x == kNegInf) return kInf;
  return -(x - mu) / sigma;
}

void check_subset(std::span<const std::size_t> subset, std::size_t dim) {
  if (subset.empty()) fail(ErrorCode::invalid_argument, "index subset must be nonempty");
  std::set<std::size_t> seen;
  for (auto t : subset) {
    if (t >= dim) fail(ErrorCode::invalid_argument, "index subset entry out of range");
    if (!seen.insert(t).second) fail(ErrorCode::invalid_argument, "index subset has duplicates");
  }
}

// log sum_{t in subset} c[t, a] exp(mu_t / sigma) for every a.
std::vector<double> log_subset_weights(const MixtureSpec& spec, std::span<const std::size_t> subset) {
  const double sigma = spec.sigma()[0];
  std::vector<double> out(spec.mixing_size());
  for (std::size_t a = 0; a < spec.mixing_size(); ++a) {
    LogSumExp acc;
    for (auto t : subset) {
      const double c = spec.coefficients()(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(a));
      if (c > 0.0) acc.add(std::log(c) + spec.mu()[t] / sigma);
    }
    out[a] = acc.value();
  }
  return out;
}

template <class Fill>
Eigen::MatrixXd simulate_blocks(std::size_t replicates, std::size_t dim, std::uint64_t seed,
                                Fill fill) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(replicates), static_cast<Eigen::Index>(dim));
  std::vector<double> row(dim);
  for (std::size_t start = 0, block = 0; start < replicates; start += kReplicateBlock, ++block) {
    Rng rng(derive_seed(seed, block));
    const std::size_t stop = std::min(replicates, start + kReplicateBlock);
    for (std::size_t r = start; r < stop; ++r) {
      fill(rng, row);
      for (std::size_t t = 0; t < dim; ++t)
        out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t)) = row[t];
    }
  }
  return out;
}

// log H_t = log sum_a c[t, a] S_a for every t, from log S.
void log_directing(const Eigen::MatrixXd& c, std::span<const double> log_s, std::vector<double>& out) {
  out.resize(static_cast<std::size_t>(c.rows()));
  for (Eigen::Index t = 0; t < c.rows(); ++t) {
    LogSumExp acc;
    for (Eigen::Index a = 0; a < c.cols(); ++a)
      if (c(t, a) > 0.0) acc.add(std::log(c(t, a)) + log_s[static_cast<std::size_t>(a)]);
    out[static_cast<std::size_t>(t)] = acc.value();
  }
}

}  // namespace

MixtureSpec::MixtureSpec(Eigen::MatrixXd coefficients, std::vector<double> mu,
                         std::vector<double> sigma, double alpha)
    : c_(std::move(coefficients)), mu_(std::move(mu)), sigma_(std::move(sigma)), alpha_(alpha) {
  check_index(alpha_, "alpha");
  if (mu_.empty()) fail(ErrorCode::invalid_argument, "mixture needs at least one coordinate");
  if (sigma_.size() != mu_.size() || static_cast<std::size_t>(c_.rows()) != mu_.size())
    fail(ErrorCode::invalid_argument, "coefficient rows, mu and sigma must have equal length");
  if (c_.cols() == 0) fail(ErrorCode::invalid_argument, "mixture needs at least one mixing variable");
  for (std::size_t t = 0; t < mu_.size(); ++t) {
    if (!std::isfinite(mu_[t])) fail(ErrorCode::invalid_argument, "mu must be finite");
    check_scale(sigma_[t]);
    bool positive = false;
    for (Eigen::Index a = 0; a < c_.cols(); ++a) {
      const double c = c_(static_cast<Eigen::Index>(t), a);
      if (!(c >= 0.0) || !std::isfinite(c))
        fail(ErrorCode::invalid_argument, "coefficients must be finite and nonnegative");
      positive = positive || c > 0.0;
    }
    if (!positive)
      fail(ErrorCode::invalid_argument, "coefficient row " + std::to_string(t) + " has no positive entry");
  }
}

bool MixtureSpec::common_scale() const {
  return std::all_of(sigma_.begin(), sigma_.end(), [&](double s) { return s == sigma_[0]; });
}

double log_joint_cdf_from_log_z(const Eigen::MatrixXd& c, double alpha,
                                std::span<const double> log_z) {
  check_dimension(log_z.size(), static_cast<std::size_t>(c.rows()));
  for (double lz : log_z)
    if (lz == kInf) return kNegInf;
  CompensatedSum total;
  for (Eigen::Index a = 0; a < c.cols(); ++a) {
    LogSumExp acc;
    for (Eigen::Index t = 0; t < c.rows(); ++t)
      if (c(t, a) > 0.0) acc.add(std::log(c(t, a)) + log_z[static_cast<std::size_t>(t)]);
    const double log_sum = acc.value();
    if (log_sum != kNegInf) total.add(std::exp(alpha * log_sum));
  }
  return -total.value();
}

double log_joint_cdf(const MixtureSpec& spec, std::span<const double> x) {
  check_dimension(x.size(), spec.dimension());
  std::vector<double> log_z(x.size());
  for (std::size_t t = 0; t < x.size(); ++t)
    log_z[t] = gumbel_log_z(x[t], spec.mu()[t], spec.sigma()[t]);
  return log_joint_cdf_from_log_z(spec.coefficients(), spec.alpha(), log_z);
}

double joint_cdf(const MixtureSpec& spec, std::span<const double> x) {
  return std::exp(log_joint_cdf(spec, x));
}

GumbelParams max_distribution(const MixtureSpec& spec, std::span<const std::size_t> subset) {
  if (!spec.common_scale())
    fail(ErrorCode::invalid_argument, "max distributions require a common scale sigma");
  check_subset(subset, spec.dimension());
  const double sigma = spec.sigma()[0];
  const double alpha = spec.alpha();
  LogSumExp acc;
  for (double lw : log_subset_weights(spec, subset))
    if (lw != kNegInf) acc.add(alpha * lw);
  return {sigma / alpha * acc.value(), sigma / alpha};
}

double joint_max_cdf(const MixtureSpec& spec, std::span<const std::size_t> first,
                     std::span<const std::size_t> second, double x1, double x2) {
  if (!spec.common_scale())
    fail(ErrorCode::invalid_argument, "max distributions require a common scale sigma");
  check_subset(first, spec.dimension());
  check_subset(second, spec.dimension());
  for (auto t : first)
    if (std::find(second.begin(), second.end(), t) != second.end())
      fail(ErrorCode::invalid_argument, "index subsets for joint maxima must be disjoint");
  const double sigma = spec.sigma()[0];
  const double lz1 = gumbel_log_z(x1, 0.0, sigma);
  const double lz2 = gumbel_log_z(x2, 0.0, sigma);
  if (lz1 == kInf || lz2 == kInf) return 0.0;
  const auto w1 = log_subset_weights(spec, first);
  const auto w2 = log_subset_weights(spec, second);
  CompensatedSum total;
  for (std::size_t a = 0; a < spec.mixing_size(); ++a) {
    LogSumExp acc;
    acc.add(w1[a] + lz1);
    acc.add(w2[a] + lz2);
    const double log_sum = acc.value();
    if (log_sum != kNegInf) total.add(std::exp(spec.alpha() * log_sum));
  }
  return std::exp(-total.value());
}

// ---------------------------------------------------------------------------

MixtureSpec build_random_effects(const RandomEffectsSpec& spec) {
  if (spec.group_sizes.empty()) fail(ErrorCode::invalid_argument, "random effects need m >= 1 groups");
  std::size_t total = 0;
  for (auto n : spec.group_sizes) {
    if (n == 0) fail(ErrorCode::invalid_argument, "group sizes must be >= 1");
    total += n;
  }
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(total),
                                            static_cast<Eigen::Index>(spec.group_sizes.size()));
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < spec.group_sizes.size(); ++i)
    for (std::size_t j = 0; j < spec.group_sizes[i]; ++j) c(row++, static_cast<Eigen::Index>(i)) = 1.0;
  return MixtureSpec(std::move(c), std::vector<double>(total, spec.mu),
                     std::vector<double>(total, spec.sigma), spec.alpha);
}

MixtureSpec build_hidden_ma(const HiddenMaSpec& spec) {
  const std::size_t n = spec.mu.size();
  if (n == 0) fail(ErrorCode::invalid_argument, "hidden MA needs at least one time point");
  if (spec.b.empty()) fail(ErrorCode::invalid_argument, "hidden MA needs coefficients b_0..b_q");
  const std::size_t q = spec.b.size() - 1;
  // Column k corresponds to S_{k + 1 - q}, covering k + 1 - q = 1 - q .. n.
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n + q));
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t lag = 0; lag <= q; ++lag) {
      const double b = spec.b[lag];
      if (!(b >= 0.0) || !std::isfinite(b))
        fail(ErrorCode::invalid_argument, "MA coefficients must be finite and nonnegative");
      c(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(t + q - lag)) = b;
    }
  return MixtureSpec(std::move(c), spec.mu, std::vector<double>(n, spec.sigma), spec.alpha);
}

MixtureSpec build_hidden_ar(const HiddenArSpec& spec) {
  const std::size_t n = spec.mu.size();
  if (n == 0) fail(ErrorCode::invalid_argument, "hidden AR needs at least one time point");
  if (!(spec.rho > 0.0 && spec.rho < 1.0)) fail(ErrorCode::invalid_argument, "rho must lie in (0, 1)");
  check_index(spec.alpha, "alpha");
  // Column 0 carries the stationary start H_0 = (1 - rho^alpha)^(-1/alpha) S_0.
  const double start = std::pow(-std::expm1(spec.alpha * std::log(spec.rho)), -1.0 / spec.alpha);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t t = 0; t < n; ++t) {
    const auto row = static_cast<Eigen::Index>(t);
    c(row, 0) = std::pow(spec.rho, static_cast<double>(t)) * start;
    for (std::size_t a = 1; a <= t; ++a)
      c(row, static_cast<Eigen::Index>(a)) = std::pow(spec.rho, static_cast<double>(t - a));
  }
  return MixtureSpec(std::move(c), spec.mu, std::vector<double>(n, spec.sigma), spec.alpha);
}

Neighborhood cross_neighborhood() { return {{0, 0}, {-1, 0}, {1, 0}, {0, -1}, {0, 1}}; }

MixtureSpec build_spatial_ma(const SpatialMaSpec& spec) {
  const std::size_t n = spec.n;
  if (n == 0) fail(ErrorCode::invalid_argument, "spatial grid size must be >= 1");
  if (!(spec.delta > 0.0) || !std::isfinite(spec.delta))
    fail(ErrorCode::invalid_argument, "spatial delta must be positive");
  const auto& hood = spec.neighborhood;
  if (std::find(hood.begin(), hood.end(), GridOffset{0, 0}) == hood.end())
    fail(ErrorCode::invalid_argument, "neighborhood must contain the point itself");
  for (std::size_t i = 0; i < hood.size(); ++i) {
    if (std::find(hood.begin(), hood.end(), GridOffset{-hood[i].di, -hood[i].dj}) == hood.end())
      fail(ErrorCode::invalid_argument, "neighborhood must be symmetric");
    if (std::find(hood.begin() + static_cast<std::ptrdiff_t>(i) + 1, hood.end(), hood[i]) != hood.end())
      fail(ErrorCode::invalid_argument, "neighborhood has duplicate offsets");
  }
  std::vector<double> mu;
  if (spec.mu.size() == 1)
    mu.assign(n * n, spec.mu[0]);
  else if (spec.mu.size() == n * n)
    mu = spec.mu;
  else
    fail(ErrorCode::invalid_argument, "spatial mu needs 1 or n*n entries");

  // Mixing sites: every (k, l) whose neighborhood meets the grid.
  std::map<std::pair<int, int>, Eigen::Index> sites;
  const int size = static_cast<int>(n);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j)
      for (const auto& d : hood) sites.emplace(std::pair{i - d.di, j - d.dj}, 0);
  Eigen::Index next = 0;
  for (auto& [site, col] : sites) col = next++;

  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n * n), next);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j)
      for (const auto& d : hood)
        c(static_cast<Eigen::Index>(i * size + j), sites.at({i - d.di, j - d.dj})) = spec.delta;
  return MixtureSpec(std::move(c), std::move(mu), std::vector<double>(n * n, spec.sigma), spec.alpha);
}

std::size_t HierarchicalSpec::dimension() const {
  std::size_t n = 0;
  for (const auto& inner : shape)
    for (auto r : inner) n += r;
  return n;
}

namespace {

void validate(const HierarchicalSpec& spec) {
  check_index(spec.alpha, "alpha");
  check_index(spec.beta, "beta");
  check_scale(spec.sigma);
  if (!std::isfinite(spec.mu)) fail(ErrorCode::invalid_argument, "mu must be finite");
  if (spec.shape.empty()) fail(ErrorCode::invalid_argument, "hierarchical model needs m >= 1");
  for (const auto& inner : spec.shape) {
    if (inner.empty()) fail(ErrorCode::invalid_argument, "every outer group needs n_i >= 1");
    for (auto r : inner)
      if (r == 0) fail(ErrorCode::invalid_argument, "every subgroup needs r_ij >= 1");
  }
}

}  // namespace

double hierarchical_cdf(const HierarchicalSpec& spec, std::span<const double> x) {
  validate(spec);
  check_dimension(x.size(), spec.dimension());
  std::size_t pos = 0;
  CompensatedSum total;
  for (const auto& inner : spec.shape) {
    LogSumExp outer;
    bool zero = false;
    for (auto r : inner) {
      LogSumExp acc;
      for (std::size_t k = 0; k < r; ++k) {
        const double lz = gumbel_log_z(x[pos++], spec.mu, spec.sigma);
        if (lz == kInf) zero = true;
        acc.add(lz);
      }
      if (acc.value() != kNegInf) outer.add(spec.alpha * acc.value());
    }
    if (zero) return 0.0;
    if (outer.value() != kNegInf) total.add(std::exp(spec.beta * outer.value()));
  }
  return std::exp(-total.value());
}

Eigen::MatrixXd simulate(const MixtureSpec& spec, std::size_t replicates, std::uint64_t seed) {
  const StableLaw law(spec.alpha());
  const std::size_t dim = spec.dimension();
  std::vector<double> log_s(spec.mixing_size());
  std::vector<double> log_h;
  return simulate_blocks(replicates, dim, seed, [&](Rng& rng, std::vector<double>& row) {
    for (auto& v : log_s) v = draw_log_stable(law, rng);
    log_directing(spec.coefficients(), log_s, log_h);
    for (std::size_t t = 0; t < dim; ++t) {
      const double sigma = spec.sigma()[t];
      row[t] = gumbel_draw(GumbelParams(spec.mu()[t], sigma), rng) + sigma * log_h[t];
    }
  });
}

Eigen::MatrixXd simulate(const HierarchicalSpec& spec, std::size_t replicates, std::uint64_t seed) {
  validate(spec);
  const StableLaw outer_law(spec.beta);
  const StableLaw inner_law(spec.alpha);
  const GumbelParams noise(spec.mu, spec.sigma);
  // Shift sigma log S_ij + (sigma / alpha) log S_i integrates to the nested cdf.
  return simulate_blocks(replicates, spec.dimension(), seed, [&](Rng& rng, std::vector<double>& row) {
    std::size_t pos = 0;
    for (const auto& inner : spec.shape) {
      const double outer_shift = spec.sigma / spec.alpha * draw_log_stable(outer_law, rng);
      for (auto r : inner) {
        const double shift = outer_shift + spec.sigma * draw_log_stable(inner_law, rng);
        for (std::size_t k = 0; k < r; ++k) row[pos++] = gumbel_draw(noise, rng) + shift;
      }
    }
  });
}

// ---------------------------------------------------------------------------

GevParams GevMixtureSpec::margin(std::size_t t) const {
  return GevParams(base.mu()[t], base.sigma()[t], gamma.at(t));
}

GevMixtureSpec gev_translate(const MixtureSpec& spec, double gamma) {
  GevMixtureSpec out{spec, std::vector<double>(spec.dimension(), gamma)};
  for (std::size_t t = 0; t < spec.dimension(); ++t) (void)out.margin(t);
  return out;
}

double gev_joint_cdf(const GevMixtureSpec& spec, std::span<const double> x) {
  check_dimension(x.size(), spec.base.dimension());
  std::vector<double> log_z(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (std::isnan(x[t])) fail(ErrorCode::invalid_argument, "NaN coordinate");
    log_z[t] = x[t] == kInf ? kNegInf : x[t] == kNegInf ? kInf : gev_log_z(spec.margin(t), x[t]);
  }
  return std::exp(log_joint_cdf_from_log_z(spec.base.coefficients(), spec.base.alpha(), log_z));
}

Eigen::MatrixXd gev_simulate(const GevMixtureSpec& spec, std::size_t replicates, std::uint64_t seed) {
  const MixtureSpec& base = spec.base;
  const StableLaw law(base.alpha());
  const std::size_t dim = base.dimension();
  std::vector<GevParams> margins;
  for (std::size_t t = 0; t < dim; ++t) margins.push_back(spec.margin(t));
  std::vector<double> log_s(base.mixing_size());
  std::vector<double> log_h;
  return simulate_blocks(replicates, dim, seed, [&](Rng& rng, std::vector<double>& row) {
    for (auto& v : log_s) v = draw_log_stable(law, rng);
    log_directing(base.coefficients(), log_s, log_h);
    for (std::size_t t = 0; t < dim; ++t) {
      const double e = gev_draw(margins[t], rng);
      if (log_h[t] == 0.0) {
        row[t] = e;
        continue;
      }
      const double delta = margins[t].endpoint();
      row[t] = delta + std::exp(margins[t].gamma * log_h[t]) * (e - delta);
    }
  });
}

}  // namespace stablemix
