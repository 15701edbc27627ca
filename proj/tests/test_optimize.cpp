#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "stablemix/error.hpp"
#include "stablemix/optimize.hpp"

using namespace stablemix;

TEST(NelderMead, Quadratic) {
  const std::vector<double> centre{1.0, -2.0, 0.5, 3.0, -1.0, 0.0, 2.0, -0.5, 1.5, -3.0};
  auto f = [&](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (i + 1.0) * (x[i] - centre[i]) * (x[i] - centre[i]);
    return s;
  };
  const std::vector<double> start(10, 0.0);
  NelderMeadOptions opt;
  opt.max_evaluations = 20000;
  opt.initial_step = {1.0};
  opt.value_tolerance = 1e-14;
  const auto r = nelder_mead(f, start, opt);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(r.value, 1e-8);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(r.x[i], centre[i], 1e-3);
}

TEST(NelderMead, Rosenbrock) {
  auto f = [](std::span<const double> x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  const std::vector<double> start{-1.2, 1.0};
  NelderMeadOptions opt;
  opt.value_tolerance = 1e-14;
  opt.initial_step = {0.5};
  const auto r = nelder_mead(f, start, opt);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-4);
  EXPECT_NEAR(r.x[1], 1.0, 2e-4);
  EXPECT_LE(r.evaluations, opt.max_evaluations);
}

TEST(NelderMead, NonFiniteValuesAreRejected) {
  // Minimum of (x - 2)^2 on x > 1, NaN elsewhere.
  auto f = [](std::span<const double> x) { return x[0] > 1.0 ? (x[0] - 2.0) * (x[0] - 2.0) : NAN; };
  const std::vector<double> start{1.5};
  NelderMeadOptions opt;
  opt.initial_step = {2.0};
  const auto r = nelder_mead(f, start, opt);
  EXPECT_TRUE(std::isfinite(r.value));
  EXPECT_NEAR(r.x[0], 2.0, 1e-3);
}

TEST(NelderMead, EvaluationCap) {
  std::size_t calls = 0;
  auto f = [&](std::span<const double> x) {
    ++calls;
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  const std::vector<double> start{-1.2, 1.0};
  NelderMeadOptions opt;
  opt.max_evaluations = 30;
  const auto r = nelder_mead(f, start, opt);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.evaluations, 30u + 2u);
  EXPECT_EQ(r.evaluations, calls);
}

TEST(NelderMead, PerCoordinateSteps) {
  // Coordinates on wildly different scales.
  auto f = [](std::span<const double> x) {
    return std::pow((x[0] - 1000.0) / 100.0, 2) + std::pow((x[1] - 0.001) / 0.0001, 2);
  };
  const std::vector<double> start{900.0, 0.0015};
  NelderMeadOptions opt;
  opt.initial_step = {50.0, 0.0005};
  opt.value_tolerance = 1e-14;
  const auto r = nelder_mead(f, start, opt);
  EXPECT_NEAR(r.x[0], 1000.0, 0.1);
  EXPECT_NEAR(r.x[1], 0.001, 1e-7);
}

TEST(NelderMead, Deterministic) {
  auto f = [](std::span<const double> x) { return std::cosh(x[0] - 0.3) + x[1] * x[1] * std::exp(x[0]); };
  const std::vector<double> start{2.0, 1.0};
  const auto a = nelder_mead(f, start);
  const auto b = nelder_mead(f, start);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(NelderMead, BadInput) {
  auto f = [](std::span<const double> x) { return x[0]; };
  EXPECT_THROW(nelder_mead(f, std::vector<double>{}), Error);
  NelderMeadOptions opt;
  opt.initial_step = {0.1, 0.2, 0.3};
  EXPECT_THROW(nelder_mead(f, std::vector<double>{0.0, 1.0}, opt), Error);
}
