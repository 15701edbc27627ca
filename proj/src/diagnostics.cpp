#include "stablemix/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "stablemix/error.hpp"
#include "stablemix/numeric.hpp"

namespace stablemix {

QqPlotData exps_qq(std::span<const double> locations, const ExpSParams& fitted) {
  const std::size_t m = locations.size();
  if (m < 2) fail(ErrorCode::invalid_argument, "qq-plot needs at least two locations");
  if (fitted.law().degenerate())
    fail(ErrorCode::degenerate_law, "qq-plot against ExpS with alpha = 1 (a point mass)");
  QqPlotData qq;
  qq.empirical.assign(locations.begin(), locations.end());
  std::sort(qq.empirical.begin(), qq.empirical.end());
  qq.theoretical.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    qq.theoretical[i] = exps_quantile(fitted, (static_cast<double>(i) + 0.5) / static_cast<double>(m));

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += qq.theoretical[i];
    my += qq.empirical[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (qq.theoretical[i] - mx) * (qq.theoretical[i] - mx);
    sxy += (qq.theoretical[i] - mx) * (qq.empirical[i] - my);
  }
  qq.ls_slope = sxy / sxx;
  qq.ls_intercept = my - qq.ls_slope * mx;
  return qq;
}

double implied_correlation(double alpha) {
  require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
  return 1.0 - alpha * alpha;
}

double within_group_correlation(const GroupedSample& data) {
  // Each observation of group i appears in n_i - 1 pairs per order.
  CompensatedSum weighted, weight;
  for (const auto& g : data.groups) {
    const double w = static_cast<double>(g.values.size()) - 1.0;
    if (w <= 0.0) continue;
    for (double x : g.values) weighted.add(w * x);
    weight.add(w * static_cast<double>(g.values.size()));
  }
  if (!(weight.value() > 0.0)) fail(ErrorCode::data, "no within-group pairs available");
  const double center = weighted.value() / weight.value();

  // Over unordered pairs of group i: sum d_j d_k = (s^2 - q) / 2 and
  // sum (d_j^2 + d_k^2) / 2 = (n - 1) q / 2, with s = sum d and q = sum d^2.
  CompensatedSum num, den;
  for (const auto& g : data.groups) {
    if (g.values.size() < 2) continue;
    CompensatedSum s, q;
    for (double x : g.values) {
      const double d = x - center;
      s.add(d);
      q.add(d * d);
    }
    num.add(s.value() * s.value() - q.value());
    den.add((static_cast<double>(g.values.size()) - 1.0) * q.value());
  }
  if (!(den.value() > 0.0)) fail(ErrorCode::data, "within-group pairs have zero variance");
  return std::clamp(num.value() / den.value(), -1.0, 1.0);
}

DiagnosticReport diagnostic_report(const FitResult& fit, const GroupedSample& data) {
  if (fit.model != "random_effects")
    fail(ErrorCode::invalid_argument, "diagnostics need a random-effects fit");
  const double mu = fit.estimate("mu");
  const double sigma = fit.estimate("sigma");
  const double alpha = fit.estimate("alpha");

  DiagnosticReport report;
  for (const auto& g : data.groups) report.gumbel_plots.push_back({g.key, gumbel_plot_coords(g.values)});
  report.conditional = fit_conditional_gumbel_models(data);

  // Group locations from the common-sigma model estimate mu + tau_i.
  const auto& common = report.conditional.common_sigma;
  std::vector<double> locations(common.estimates.begin(), common.estimates.end() - 1);
  if (alpha < 1.0) {
    report.qq = exps_qq(locations, ExpSParams(alpha, mu, sigma));
  } else {
    report.notes.push_back("alpha_hat = 1: the mixing law is a point mass, no qq-plot");
  }

  report.implied_correlation = implied_correlation(alpha);
  report.empirical_correlation = within_group_correlation(data);
  report.notes.push_back(
      "empirical correlation pools all within-group pairs centered at the grand mean");

  report.sigma_hat = sigma;
  report.sigma_common = common.estimates.back();
  report.sigma_relative_difference = (sigma - report.sigma_common) / report.sigma_common;
  report.sigma_star = sigma / alpha;
  report.sigma_pooled = report.conditional.pooled.estimates[1];
  report.sigma_star_relative_difference =
      (report.sigma_star - report.sigma_pooled) / report.sigma_pooled;
  return report;
}

}  // namespace stablemix
