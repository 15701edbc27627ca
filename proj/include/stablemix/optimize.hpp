#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace stablemix {

using Objective = std::function<double(std::span<const double>)>;

struct NelderMeadOptions {
  std::size_t max_evaluations = 2000;
  /// Converged when max - min of the simplex values is below this.
  double value_tolerance = 1e-8;
  /// Initial simplex edge per coordinate (one value broadcasts).
  std::vector<double> initial_step{0.1};
  /// Restarts from the incumbent after convergence (polishing passes).
  int restarts = 1;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Minimizes `f` with the dimension-adaptive Nelder-Mead simplex
/// (reflection 1, expansion 1 + 2/n, contraction 0.75 - 1/(2n), shrink 1 - 1/n).
/// Non-finite objective values are treated as +inf.
NelderMeadResult nelder_mead(const Objective& f, std::span<const double> start,
                             const NelderMeadOptions& options = {});

}  // namespace stablemix
