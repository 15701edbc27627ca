#pragma once

// Model checks for random-effects fits: Gumbel plots, the exponential-stable
// qq-plot of group locations and correlation comparisons.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stablemix/data.hpp"
#include "stablemix/estimation.hpp"
#include "stablemix/evd.hpp"
#include "stablemix/stable.hpp"

namespace stablemix {

struct QqPlotData {
  std::vector<double> theoretical;  // ExpS quantiles at (i - 0.5) / m
  std::vector<double> empirical;    // sorted estimates
  // Identity reference line and the least-squares line of empirical on theoretical.
  double reference_intercept = 0.0;
  double reference_slope = 1.0;
  double ls_intercept = 0.0;
  double ls_slope = 1.0;
};

QqPlotData exps_qq(std::span<const double> locations, const ExpSParams& fitted);

/// 1 - alpha^2, the correlation of two observations sharing a random effect.
double implied_correlation(double alpha);

/// Pearson correlation over all unordered within-group pairs, both orders
/// included, centered at the pair-weighted grand mean (not group means).
double within_group_correlation(const GroupedSample& data);

struct GroupPlot {
  std::string key;
  std::vector<PlotPoint> points;
};

struct DiagnosticReport {
  std::vector<GroupPlot> gumbel_plots;
  std::optional<QqPlotData> qq;  // absent when alpha_hat == 1
  double implied_correlation = 0.0;
  double empirical_correlation = 0.0;
  ConditionalModels conditional;
  // sigma_hat against the common-sigma conditional fit, and sigma_hat / alpha_hat
  // against the pooled Gumbel scale. Relative differences are (a - b) / b.
  double sigma_hat = 0.0;
  double sigma_common = 0.0;
  double sigma_relative_difference = 0.0;
  double sigma_star = 0.0;
  double sigma_pooled = 0.0;
  double sigma_star_relative_difference = 0.0;
  std::vector<std::string> notes;
};

/// Requires a random-effects fit (parameters mu, sigma, alpha).
DiagnosticReport diagnostic_report(const FitResult& fit, const GroupedSample& data);

}  // namespace stablemix
