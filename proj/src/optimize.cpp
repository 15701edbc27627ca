#include "stablemix/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stablemix/error.hpp"

namespace stablemix {

namespace {

struct Pass {
  std::vector<double> x;
  double value;
  std::size_t evaluations;
  bool converged;
};

Pass simplex_pass(const Objective& raw, std::vector<double> start, const NelderMeadOptions& opt,
                  std::size_t budget) {
  const std::size_t n = start.size();
  const double dn = static_cast<double>(n);
  const double reflect = 1.0;
  const double expand = 1.0 + 2.0 / dn;
  const double contract = 0.75 - 0.5 / dn;
  const double shrink = 1.0 - 1.0 / dn;

  std::size_t evals = 0;
  auto f = [&](const std::vector<double>& x) {
    ++evals;
    const double v = raw(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> pts(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) {
    const double step = opt.initial_step.size() == 1 ? opt.initial_step[0] : opt.initial_step[i];
    pts[i + 1][i] += step;
  }
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  bool converged = false;
  while (evals < budget) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto l, auto r) { return vals[l] < vals[r]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];
    if (std::isfinite(vals[worst]) && vals[worst] - vals[best] <= opt.value_tolerance) {
      converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += pts[order[k]][i] / dn;
    auto along = [&](double coef, std::vector<double>& out) {
      for (std::size_t i = 0; i < n; ++i) out[i] = centroid[i] + coef * (centroid[i] - pts[worst][i]);
    };

    along(reflect, trial);
    const double fr = f(trial);
    if (fr < vals[best]) {
      along(expand, trial2);
      const double fe = f(trial2);
      if (fe < fr) {
        pts[worst] = trial2;
        vals[worst] = fe;
      } else {
        pts[worst] = trial;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = trial;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    along(outside ? contract : -contract, trial2);
    const double fc = f(trial2);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = trial2;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t k = 1; k <= n; ++k) {
      auto& p = pts[order[k]];
      for (std::size_t i = 0; i < n; ++i) p[i] = pts[best][i] + shrink * (p[i] - pts[best][i]);
      vals[order[k]] = f(p);
    }
  }
  const auto it = std::min_element(vals.begin(), vals.end());
  const auto idx = static_cast<std::size_t>(it - vals.begin());
  return {pts[idx], vals[idx], evals, converged};
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::span<const double> start,
                             const NelderMeadOptions& options) {
  if (start.empty()) fail(ErrorCode::invalid_argument, "Nelder-Mead needs at least one parameter");
  if (options.initial_step.size() != 1 && options.initial_step.size() != start.size())
    fail(ErrorCode::invalid_argument, "initial_step must have 1 or n entries");

  NelderMeadResult result;
  auto p = simplex_pass(f, {start.begin(), start.end()}, options, options.max_evaluations);
  result.evaluations = p.evaluations;
  result.x = p.x;
  result.value = p.value;
  result.converged = p.converged;
  for (int pass = 0; pass < options.restarts && result.converged; ++pass) {
    if (result.evaluations >= options.max_evaluations) break;
    p = simplex_pass(f, result.x, options, options.max_evaluations - result.evaluations);
    result.evaluations += p.evaluations;
    result.converged = p.converged;
    const bool improved = p.value < result.value - options.value_tolerance;
    if (p.value < result.value) {
      result.x = p.x;
      result.value = p.value;
    }
    if (!improved) break;
  }
  return result;
}

}  // namespace stablemix
