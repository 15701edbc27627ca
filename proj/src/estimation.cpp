#include "stablemix/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "stablemix/error.hpp"
#include "stablemix/likelihood.hpp"
#include "stablemix/numeric.hpp"
#include "stablemix/rng.hpp"

namespace stablemix {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double logistic(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

// Wraps a natural-scale log-likelihood as a minimization objective on the
// unconstrained scale. Numeric failures count as an infinitely bad point.
Objective negated(const std::function<double(std::span<const double>)>& loglik,
                  const ParameterTransform& transform) {
  return [&loglik, &transform](std::span<const double> u) {
    try {
      const auto theta = transform.to_natural(u);
      return -loglik(theta);
    } catch (const Error&) {
      return kInf;
    }
  };
}

void attach_covariance(FitResult& fit, const std::function<double(std::span<const double>)>& loglik,
                       const ParameterTransform& transform, std::span<const double> scales) {
  const auto info = observed_information(loglik, fit.estimates, transform, scales);
  if (!info.covariance) {
    fit.warnings.push_back(info.warning);
    return;
  }
  fit.covariance = info.covariance;
  fit.std_errors.resize(fit.estimates.size());
  for (std::size_t i = 0; i < fit.estimates.size(); ++i)
    fit.std_errors[i] = std::sqrt(std::max(0.0, (*fit.covariance)(i, i)));
}

// Standard error of a function of (sigma, alpha) with the given gradient.
double pair_se(const FitResult& fit, std::size_t i, std::size_t j, double gi, double gj) {
  if (!fit.covariance) return kNaN;
  const auto& c = *fit.covariance;
  const double v = gi * gi * c(i, i) + 2.0 * gi * gj * c(i, j) + gj * gj * c(j, j);
  return std::sqrt(std::max(0.0, v));
}

std::size_t evaluation_cap(const FitOptions& o, std::size_t parameters) {
  return o.max_evaluations > 0 ? o.max_evaluations : std::max<std::size_t>(2000, 400 * parameters);
}

// Warns when alpha sits on the fitting boundary, or when its Wald interval
// reaches past it (the normal approximation is then unreliable).
void flag_alpha_boundary(FitResult& fit, std::size_t ia) {
  const double alpha = fit.estimates[ia];
  const double margin = 1e-3 * (kAlphaUpper - kAlphaLower);
  const double reach = fit.std_errors.empty() ? 0.0 : 1.96 * fit.std_errors[ia];
  const std::string range = "[" + format_double(kAlphaLower) + ", " + format_double(kAlphaUpper) + "]";
  if (alpha - kAlphaLower < margin || kAlphaUpper - alpha < margin)
    fit.warnings.push_back("alpha estimate at the boundary of " + range +
                           "; Wald standard errors are unreliable");
  else if (alpha - reach < kAlphaLower || alpha + reach > kAlphaUpper)
    fit.warnings.push_back("alpha estimate near the boundary of " + range +
                           ": its 95% Wald interval crosses it");
}

// ---------------------------------------------------------------------------
// Gumbel MLE with group-specific locations and one scale.
//
// For fixed sigma the location MLE of group i is
//   mu_i = -sigma * log(mean_j exp(-x_ij / sigma)),
// and the profile score in sigma is sum_i n_i (sigma - mean_i x + wmean_i x)
// with weights exp(-x_ij / sigma); it is increasing in sigma.

double weighted_mean(std::span<const double> x, double sigma) {
  const double lo = *std::min_element(x.begin(), x.end());
  CompensatedSum num, den;
  for (double v : x) {
    const double w = std::exp(-(v - lo) / sigma);
    num.add(w * (v - lo));
    den.add(w);
  }
  return lo + num.value() / den.value();
}

double profile_location(std::span<const double> x, double sigma) {
  const double lo = *std::min_element(x.begin(), x.end());
  LogSumExp lse;
  for (double v : x) lse.add(-(v - lo) / sigma);
  return lo - sigma * (lse.value() - std::log(static_cast<double>(x.size())));
}

double mean_of(std::span<const double> x) {
  CompensatedSum s;
  for (double v : x) s.add(v);
  return s.value() / static_cast<double>(x.size());
}

double common_scale_mle(const std::vector<std::span<const double>>& groups) {
  double spread = 0.0;
  for (auto g : groups) {
    const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
    spread = std::max(spread, *hi - *lo);
  }
  if (!(spread > 0.0)) fail(ErrorCode::data, "Gumbel MLE needs non-constant data");
  auto score = [&](double log_sigma) {
    const double sigma = std::exp(log_sigma);
    CompensatedSum s;
    for (auto g : groups)
      s.add(static_cast<double>(g.size()) * (sigma - mean_of(g) + weighted_mean(g, sigma)));
    return s.value();
  };
  double lo = std::log(spread) - 3.0;
  double hi = std::log(spread) + 1.0;
  for (int k = 0; k < 200 && score(lo) >= 0.0; ++k) lo -= 2.0;
  for (int k = 0; k < 200 && score(hi) <= 0.0; ++k) hi += 2.0;
  std::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(
      score, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  return std::exp(0.5 * (root.first + root.second));
}

double gumbel_loglik(std::span<const double> x, double mu, double sigma) {
  const GumbelParams p(mu, sigma);
  CompensatedSum s;
  for (double v : x) s.add(gumbel_log_pdf(p, v));
  return s.value();
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<double> ParameterTransform::to_natural(std::span<const double> u) const {
  require(u.size() == kinds_.size(), "parameter vector has the wrong length");
  std::vector<double> theta(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    switch (kinds_[i]) {
      case ParamKind::real: theta[i] = u[i]; break;
      case ParamKind::positive: theta[i] = std::exp(u[i]); break;
      case ParamKind::index:
        theta[i] = kAlphaLower + (kAlphaUpper - kAlphaLower) * logistic(u[i]);
        break;
    }
  }
  return theta;
}

std::vector<double> ParameterTransform::to_unconstrained(std::span<const double> theta) const {
  require(theta.size() == kinds_.size(), "parameter vector has the wrong length");
  std::vector<double> u(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double t = theta[i];
    switch (kinds_[i]) {
      case ParamKind::real:
        require(std::isfinite(t), "parameter must be finite");
        u[i] = t;
        break;
      case ParamKind::positive:
        require(t > 0.0 && std::isfinite(t), "parameter must be positive");
        u[i] = std::log(t);
        break;
      case ParamKind::index: {
        require(t > kAlphaLower && t < kAlphaUpper, "alpha outside the fitting range");
        const double p = (t - kAlphaLower) / (kAlphaUpper - kAlphaLower);
        u[i] = std::log(p) - std::log1p(-p);
        break;
      }
    }
  }
  return u;
}

std::vector<double> ParameterTransform::jacobian(std::span<const double> u) const {
  require(u.size() == kinds_.size(), "parameter vector has the wrong length");
  std::vector<double> j(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    switch (kinds_[i]) {
      case ParamKind::real: j[i] = 1.0; break;
      case ParamKind::positive: j[i] = std::exp(u[i]); break;
      case ParamKind::index: {
        const double p = logistic(u[i]);
        j[i] = (kAlphaUpper - kAlphaLower) * p * (1.0 - p);
        break;
      }
    }
  }
  return j;
}

std::size_t FitResult::index_of(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) fail(ErrorCode::invalid_argument, "no parameter named " + name);
  return static_cast<std::size_t>(it - names.begin());
}

Information observed_information(const Objective& loglik, std::span<const double> theta_hat,
                                 const ParameterTransform& transform,
                                 std::span<const double> scales) {
  const std::size_t k = theta_hat.size();
  require(k == transform.size(), "transform does not match the parameter vector");
  require(scales.empty() || scales.size() == k, "scales must be empty or match the parameters");
  const auto u0 = transform.to_unconstrained(theta_hat);
  std::vector<double> h(k);
  for (std::size_t i = 0; i < k; ++i)
    h[i] = 1e-3 * (scales.empty() ? std::max(1.0, std::abs(u0[i])) : scales[i]);

  auto f = [&](std::vector<double> u) { return loglik(transform.to_natural(u)); };
  const double f0 = f(u0);
  Information info;
  info.negative_hessian.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  auto shifted = [&](std::size_t i, double si, std::size_t j, double sj) {
    auto u = u0;
    u[i] += si * h[i];
    u[j] += sj * h[j];
    return f(u);
  };
  for (std::size_t i = 0; i < k; ++i) {
    auto up = u0, dn = u0;
    up[i] += h[i];
    dn[i] -= h[i];
    const double d2 = (f(up) - 2.0 * f0 + f(dn)) / (h[i] * h[i]);
    info.negative_hessian(i, i) = -d2;
    for (std::size_t j = 0; j < i; ++j) {
      const double d =
          (shifted(i, 1, j, 1) - shifted(i, 1, j, -1) - shifted(i, -1, j, 1) + shifted(i, -1, j, -1)) /
          (4.0 * h[i] * h[j]);
      info.negative_hessian(i, j) = -d;
      info.negative_hessian(j, i) = -d;
    }
  }
  if (!info.negative_hessian.allFinite()) {
    info.warning = "observed information is not finite; covariance omitted";
    return info;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(info.negative_hessian);
  Eigen::VectorXd lambda = eig.eigenvalues();
  if (eig.info() != Eigen::Success || !(lambda.minCoeff() > 0.0)) {
    info.warning = "observed information is not positive definite; covariance omitted";
    return info;
  }
  const double floor = 1e-12 * lambda.sum();
  for (Eigen::Index i = 0; i < lambda.size(); ++i) lambda(i) = 1.0 / std::max(lambda(i), floor);
  const Eigen::MatrixXd cov_u =
      eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
  const auto jac = transform.jacobian(u0);
  const Eigen::VectorXd jv = Eigen::Map<const Eigen::VectorXd>(jac.data(), static_cast<Eigen::Index>(k));
  Eigen::MatrixXd cov = jv.asDiagonal() * cov_u * jv.asDiagonal();
  info.covariance = 0.5 * (cov + cov.transpose());
  return info;
}

Interval delta_method_interval(const std::function<double(std::span<const double>)>& g,
                               const FitResult& fit, double level) {
  if (!fit.covariance) fail(ErrorCode::invalid_argument, "delta method needs a covariance matrix");
  require(level > 0.0 && level < 1.0, "level must lie in (0, 1)");
  const std::size_t k = fit.estimates.size();
  const double center = g(fit.estimates);
  Eigen::VectorXd grad(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    const double se = fit.std_errors.empty() ? 0.0 : fit.std_errors[i];
    const double h = se > 0.0 ? 1e-4 * se : 1e-6 * std::max(1.0, std::abs(fit.estimates[i]));
    auto up = fit.estimates, dn = fit.estimates;
    up[i] += h;
    dn[i] -= h;
    grad(static_cast<Eigen::Index>(i)) = (g(up) - g(dn)) / (2.0 * h);
  }
  const double var = grad.dot(*fit.covariance * grad);
  const double se = std::sqrt(std::max(0.0, var));
  const boost::math::normal normal;
  const double z = boost::math::quantile(normal, 0.5 + 0.5 * level);
  return {center, center - z * se, center + z * se, se};
}

LrtResult likelihood_ratio_test(double loglik_full, double loglik_reduced, double df) {
  require(df >= 1.0, "likelihood ratio test needs df >= 1");
  require(std::isfinite(loglik_full) && std::isfinite(loglik_reduced),
          "log-likelihoods must be finite");
  double stat = 2.0 * (loglik_full - loglik_reduced);
  if (stat < -1e-6)
    fail(ErrorCode::non_convergence,
         "negative likelihood ratio statistic " + format_double(stat) +
             "; the full model fit did not reach its maximum");
  stat = std::max(stat, 0.0);
  const double p = stat == 0.0 ? 1.0 : boost::math::gamma_q(0.5 * df, 0.5 * stat);
  return {stat, df, p};
}

// ---------------------------------------------------------------------------

FitResult fit_random_effects(const GroupedSample& data, const FitOptions& options) {
  if (data.groups.size() < 2)
    fail(ErrorCode::identifiability, "random-effects parameters are not identifiable from a single group");
  const bool all_single = std::all_of(data.groups.begin(), data.groups.end(),
                                      [](const Group& g) { return g.values.size() <= 1; });
  if (all_single)
    fail(ErrorCode::identifiability,
         "random-effects parameters are not identifiable when every group has one value");

  const auto pooled = data.pooled();
  const auto pwm = pwm_fit_gumbel(pooled);
  const std::vector<double> theta0{pwm.mu, 0.5 * pwm.sigma, 0.5};
  const ParameterTransform transform({ParamKind::real, ParamKind::positive, ParamKind::index});

  const std::function<double(std::span<const double>)> loglik = [&data](std::span<const double> t) {
    return re_total_loglik(ReParams{t[0], t[1], t[2]}, data);
  };
  const auto objective = negated(loglik, transform);

  NelderMeadOptions nm;
  nm.max_evaluations = evaluation_cap(options, 3);
  nm.value_tolerance = options.tolerance;
  nm.initial_step = {0.2 * pwm.sigma, 0.2, 0.5};
  const auto u0 = transform.to_unconstrained(theta0);
  const auto opt = nelder_mead(objective, u0, nm);

  FitResult fit;
  fit.model = "random_effects";
  fit.names = {"mu", "sigma", "alpha"};
  fit.estimates = transform.to_natural(opt.x);
  fit.loglik = -opt.value;
  fit.initial_loglik = -objective(u0);
  fit.converged = opt.converged;
  fit.n_starts_used = 1;
  fit.best_start = 0;
  fit.evaluations = opt.evaluations;
  fit.n_observations = pooled.size();
  if (!opt.converged)
    fit.warnings.push_back("simplex did not converge within " +
                           std::to_string(nm.max_evaluations) + " evaluations");

  const double sigma = fit.estimates[1];
  const double alpha = fit.estimates[2];
  if (options.compute_covariance) {
    const std::vector<double> scales{sigma, 1.0, 1.0};
    attach_covariance(fit, loglik, transform, scales);
  }
  flag_alpha_boundary(fit, 2);
  fit.derived.push_back(
      {"sigma_star", sigma / alpha, pair_se(fit, 1, 2, 1.0 / alpha, -sigma / (alpha * alpha))});
  return fit;
}

FitResult fit_ma1(const SeriesSample& data, const FitOptions& options) {
  if (data.series.empty()) fail(ErrorCode::data, "no series");
  for (const auto& s : data.series)
    if (s.values.size() < 2)
      fail(ErrorCode::data, "series '" + s.key + "' has fewer than two observations");
  require(options.starts >= 1, "at least one start is required");
  require(options.ma1_sigma_start_factor > 0.0, "sigma start factor must be positive");

  const std::size_t ns = data.series.size();
  const bool free_b = !options.ma1_fix_b_zero;
  std::vector<double> mu0(ns);
  double sigma0 = 0.0;
  for (std::size_t s = 0; s < ns; ++s) {
    const auto p = pwm_fit_gumbel(data.series[s].values);
    mu0[s] = p.mu;
    sigma0 += p.sigma / static_cast<double>(ns);
  }

  // Layout: mu_1..mu_S, [b], sigma, alpha.
  std::vector<ParamKind> kinds(ns, ParamKind::real);
  if (free_b) kinds.push_back(ParamKind::positive);
  kinds.push_back(ParamKind::positive);
  kinds.push_back(ParamKind::index);
  const ParameterTransform transform(kinds);
  const std::size_t ib = ns;
  const std::size_t is = free_b ? ns + 1 : ns;
  const std::size_t ia = is + 1;

  const std::function<double(std::span<const double>)> loglik = [&](std::span<const double> t) {
    const double b = free_b ? t[ib] : 0.0;
    CompensatedSum total;
    for (std::size_t s = 0; s < ns; ++s)
      total.add(ma1_loglik(Ma1Params{t[s], b, t[is], t[ia]}, data.series[s].values));
    return total.value();
  };
  const auto objective = negated(loglik, transform);

  auto start_point = [&](double sigma, double alpha, double b) {
    std::vector<double> theta(transform.size());
    const double shift = (sigma / alpha) * std::log1p(std::pow(b, alpha));
    for (std::size_t s = 0; s < ns; ++s) theta[s] = mu0[s] - shift;
    if (free_b) theta[ib] = b;
    theta[is] = sigma;
    theta[ia] = alpha;
    return transform.to_unconstrained(theta);
  };

  NelderMeadOptions nm;
  nm.max_evaluations = evaluation_cap(options, transform.size());
  nm.value_tolerance = options.tolerance;
  nm.initial_step.assign(transform.size(), 0.2 * sigma0);
  if (free_b) nm.initial_step[ib] = 1.0;
  nm.initial_step[is] = 0.2;
  nm.initial_step[ia] = 0.5;

  // b = 0 has no unconstrained image, so the default start sits just inside.
  constexpr double kBStart = 0.01;
  FitResult fit;
  fit.model = "ma1";
  const auto u_default = start_point(options.ma1_sigma_start_factor * sigma0, 0.5, free_b ? kBStart : 0.0);
  fit.initial_loglik = -objective(u_default);

  NelderMeadResult best;
  bool have_best = false;
  bool any_converged = false;
  for (std::size_t k = 0; k < options.starts; ++k) {
    std::vector<double> u;
    if (k == 0) {
      u = u_default;
    } else {
      Rng rng(derive_seed(options.seed, k));
      const double sigma = rng.uniform(0.1 * sigma0, sigma0);
      const double alpha = rng.uniform(0.1, 0.99);
      const double b = std::max(rng.uniform(0.0, 2.0), 1e-3);
      u = start_point(sigma, alpha, free_b ? b : 0.0);
    }
    const auto r = nelder_mead(objective, u, nm);
    fit.evaluations += r.evaluations;
    any_converged = any_converged || r.converged;
    if (!have_best || r.value < best.value) {
      best = r;
      have_best = true;
      fit.best_start = k;
    }
  }
  fit.n_starts_used = options.starts;

  for (const auto& s : data.series) fit.names.push_back("mu_" + s.key);
  if (free_b) fit.names.push_back("b");
  fit.names.push_back("sigma");
  fit.names.push_back("alpha");
  fit.estimates = transform.to_natural(best.x);
  fit.loglik = -best.value;
  fit.converged = best.converged;
  fit.n_observations = data.total_size();
  if (!any_converged) fit.warnings.push_back("no start converged");
  else if (!best.converged) fit.warnings.push_back("best start did not converge");
  if (!free_b) fit.warnings.push_back("b fixed at 0");

  const double sigma = fit.estimates[is];
  const double alpha = fit.estimates[ia];
  if (options.compute_covariance) {
    std::vector<double> scales(transform.size(), 1.0);
    for (std::size_t s = 0; s < ns; ++s) scales[s] = sigma;
    attach_covariance(fit, loglik, transform, scales);
  }
  flag_alpha_boundary(fit, ia);
  fit.derived.push_back(
      {"sigma_star", sigma / alpha, pair_se(fit, is, ia, 1.0 / alpha, -sigma / (alpha * alpha))});
  const double b = free_b ? fit.estimates[ib] : 0.0;
  for (std::size_t s = 0; s < ns; ++s) {
    const double loc = fit.estimates[s] + (sigma / alpha) * std::log1p(std::pow(b, alpha));
    double se = kNaN;
    if (fit.covariance) {
      // Gradient of the marginal location by central differences on the natural scale.
      auto marginal = [&](std::span<const double> t) {
        const double bb = free_b ? t[ib] : 0.0;
        return t[s] + (t[is] / t[ia]) * std::log1p(std::pow(bb, t[ia]));
      };
      se = delta_method_interval(marginal, fit).std_error;
    }
    fit.derived.push_back({"marginal_location_" + data.series[s].key, loc, se});
  }
  return fit;
}

GumbelParams gumbel_mle(std::span<const double> data) {
  if (data.size() < 2) fail(ErrorCode::data, "Gumbel MLE needs at least two observations");
  const double sigma = common_scale_mle({data});
  return GumbelParams(profile_location(data, sigma), sigma);
}

ConditionalModels fit_conditional_gumbel_models(const GroupedSample& data) {
  const std::size_t m = data.groups.size();
  if (m < 2) fail(ErrorCode::identifiability, "conditional models need at least two groups");
  ConditionalModels out;
  const auto pooled_values = data.pooled();
  const std::size_t n_total = pooled_values.size();

  // Model 3: one (mu, sigma).
  {
    auto& fit = out.pooled;
    const auto p = gumbel_mle(pooled_values);
    fit.model = "gumbel_pooled";
    fit.names = {"mu", "sigma"};
    fit.estimates = {p.mu, p.sigma};
    fit.loglik = gumbel_loglik(pooled_values, p.mu, p.sigma);
    fit.converged = true;
    fit.n_starts_used = 1;
    fit.n_observations = n_total;
    const ParameterTransform t({ParamKind::real, ParamKind::positive});
    const std::function<double(std::span<const double>)> ll = [&](std::span<const double> th) {
      return gumbel_loglik(pooled_values, th[0], th[1]);
    };
    const std::vector<double> scales{p.sigma, 1.0};
    attach_covariance(fit, ll, t, scales);
  }

  // Model 2: mu_i per group, common sigma.
  std::vector<std::span<const double>> spans;
  for (const auto& g : data.groups) spans.emplace_back(g.values);
  {
    auto& fit = out.common_sigma;
    const double sigma = common_scale_mle(spans);
    fit.model = "gumbel_common_sigma";
    for (const auto& g : data.groups) {
      fit.names.push_back("mu_" + g.key);
      fit.estimates.push_back(profile_location(g.values, sigma));
    }
    fit.names.push_back("sigma");
    fit.estimates.push_back(sigma);
    const std::function<double(std::span<const double>)> ll = [&](std::span<const double> th) {
      CompensatedSum s;
      for (std::size_t i = 0; i < m; ++i) s.add(gumbel_loglik(spans[i], th[i], th[m]));
      return s.value();
    };
    fit.loglik = ll(fit.estimates);
    fit.converged = true;
    fit.n_starts_used = 1;
    fit.n_observations = n_total;
    std::vector<ParamKind> kinds(m, ParamKind::real);
    kinds.push_back(ParamKind::positive);
    std::vector<double> scales(m, sigma);
    scales.push_back(1.0);
    attach_covariance(fit, ll, ParameterTransform(kinds), scales);
  }

  // Model 1: (mu_i, sigma_i) per group.
  {
    auto& fit = out.separate;
    fit.model = "gumbel_separate";
    fit.converged = true;
    fit.n_starts_used = 1;
    fit.n_observations = n_total;
    CompensatedSum total;
    std::vector<double> scales;
    std::vector<ParamKind> kinds;
    for (const auto& g : data.groups) {
      fit.names.push_back("mu_" + g.key);
      fit.names.push_back("sigma_" + g.key);
      const auto [lo, hi] = std::minmax_element(g.values.begin(), g.values.end());
      if (g.values.size() < 2 || !(*hi > *lo)) {
        out.flags.push_back("group '" + g.key + "' is too small for a per-group scale");
        fit.estimates.insert(fit.estimates.end(), {kNaN, kNaN});
        fit.converged = false;
        continue;
      }
      const auto p = gumbel_mle(g.values);
      fit.estimates.insert(fit.estimates.end(), {p.mu, p.sigma});
      total.add(gumbel_loglik(g.values, p.mu, p.sigma));
      kinds.insert(kinds.end(), {ParamKind::real, ParamKind::positive});
      scales.insert(scales.end(), {p.sigma, 1.0});
    }
    if (fit.converged) {
      fit.loglik = total.value();
      const std::function<double(std::span<const double>)> ll = [&](std::span<const double> th) {
        CompensatedSum s;
        for (std::size_t i = 0; i < m; ++i) s.add(gumbel_loglik(spans[i], th[2 * i], th[2 * i + 1]));
        return s.value();
      };
      attach_covariance(fit, ll, ParameterTransform(kinds), scales);
      out.separate_vs_common = likelihood_ratio_test(fit.loglik, out.common_sigma.loglik,
                                                     static_cast<double>(m - 1));
    } else {
      fit.loglik = kNaN;
      fit.warnings.push_back("per-group scales not estimable; likelihood ratio test omitted");
    }
  }
  out.common_vs_pooled = likelihood_ratio_test(out.common_sigma.loglik, out.pooled.loglik,
                                               static_cast<double>(m - 1));
  return out;
}

}  // namespace stablemix
