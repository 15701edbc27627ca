#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "stablemix/error.hpp"
#include "stablemix/evd.hpp"
#include "stats.hpp"

using namespace stablemix;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::invalid_argument;
}

double ls_slope(const std::vector<PlotPoint>& pts) {
  double mx = 0.0, my = 0.0;
  for (const auto& p : pts) {
    mx += p.x;
    my += p.y;
  }
  mx /= pts.size();
  my /= pts.size();
  double sxy = 0.0, sxx = 0.0;
  for (const auto& p : pts) {
    sxy += (p.x - mx) * (p.y - my);
    sxx += (p.x - mx) * (p.x - mx);
  }
  return sxy / sxx;
}

}  // namespace

TEST(Gumbel, Examples) {
  const GumbelParams std_gumbel(0.0, 1.0);
  EXPECT_NEAR(gumbel_cdf(std_gumbel, 0.0), std::exp(-1.0), 1e-16);
  EXPECT_NEAR(gumbel_quantile(std_gumbel, std::exp(-1.0)), 0.0, 1e-15);
  // 1 - F is about 1.07e-6 here: hand value exp(-(1100 - 145.6) / 69.4).
  const double sf = 1.0 - gumbel_cdf(GumbelParams(145.6, 69.4), 1100.0);
  EXPECT_NEAR(sf, 1.0653982e-6, 1e-12);
  EXPECT_NEAR(gumbel_pdf(std_gumbel, 0.0), std::exp(-1.0), 1e-16);
  EXPECT_NEAR(gumbel_log_pdf(GumbelParams(1.0, 2.0), 3.0),
              std::log(gumbel_pdf(GumbelParams(1.0, 2.0), 3.0)), 1e-14);
}

TEST(Gumbel, InvalidParameters) {
  EXPECT_EQ(code_of([] { GumbelParams(0.0, 0.0); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { GumbelParams(0.0, -1.0); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { GumbelParams(NAN, 1.0); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { gumbel_quantile(GumbelParams(0, 1), 1.0); }), ErrorCode::invalid_argument);
}

TEST(Gumbel, RoundTrip) {
  for (double mu : {-5.0, 0.0, 140.0})
    for (double sigma : {0.1, 1.0, 70.0}) {
      const GumbelParams p(mu, sigma);
      for (double q : {1e-8, 0.01, 0.3, 0.5, 0.9, 0.999})
        EXPECT_NEAR(gumbel_cdf(p, gumbel_quantile(p, q)), q, 1e-10);
    }
}

TEST(Gumbel, SamplingKs) {
  const GumbelParams p(2.0, 3.0);
  const auto s = gumbel_sample(p, 100000, 5);
  EXPECT_EQ(s, gumbel_sample(p, 100000, 5));
  const double d = teststats::ks_statistic(s, [&](double x) { return gumbel_cdf(p, x); });
  EXPECT_GT(teststats::kolmogorov_pvalue(d, s.size()), 0.01);
}

TEST(Gev, Examples) {
  EXPECT_NEAR(gev_cdf(GevParams(0.0, 1.0, 1.0), 0.0), std::exp(-1.0), 1e-16);
  const GevParams frechet(0.0, 1.0, 1.0);
  EXPECT_EQ(frechet.endpoint(), -1.0);
  EXPECT_EQ(gev_cdf(frechet, -1.0), 0.0);
  EXPECT_EQ(gev_cdf(frechet, -3.0), 0.0);
  EXPECT_EQ(gev_pdf(frechet, -3.0), 0.0);
  const GevParams weibull(0.0, 1.0, -0.5);
  EXPECT_EQ(weibull.endpoint(), 2.0);
  EXPECT_EQ(gev_cdf(weibull, 2.0), 1.0);
  EXPECT_EQ(gev_cdf(weibull, 5.0), 1.0);
  EXPECT_EQ(gev_pdf(weibull, 5.0), 0.0);
  EXPECT_EQ(gev_log_z(frechet, -2.0), INFINITY);
  EXPECT_EQ(gev_log_z(weibull, 3.0), -INFINITY);
  EXPECT_EQ(code_of([] { GevParams(0.0, 1.0, 0.0); }), ErrorCode::invalid_argument);
}

TEST(Gev, RoundTrip) {
  for (double gamma : {-0.8, -0.1, 0.2, 1.5})
    for (double sigma : {0.5, 3.0}) {
      const GevParams p(1.0, sigma, gamma);
      for (double q : {1e-6, 0.05, 0.5, 0.95, 0.9999})
        EXPECT_NEAR(gev_cdf(p, gev_quantile(p, q)), q, 1e-10) << gamma;
    }
}

TEST(Gev, GumbelLimit) {
  const GumbelParams g(0.5, 2.0);
  for (double gamma : {1e-6, -1e-6}) {
    const GevParams p(0.5, 2.0, gamma);
    for (double x : {-3.0, -1.0, 0.0, 0.5, 2.0, 6.0, 12.0}) {
      EXPECT_NEAR(gev_cdf(p, x), gumbel_cdf(g, x), 1e-5);
      EXPECT_NEAR(gev_pdf(p, x), gumbel_pdf(g, x), 1e-5);
    }
  }
}

TEST(Gev, DensityMatchesDerivative) {
  const GevParams p(0.0, 1.5, 0.3);
  for (double x : {-2.0, 0.0, 1.0, 5.0}) {
    const double h = 1e-5;
    EXPECT_NEAR(gev_pdf(p, x), (gev_cdf(p, x + h) - gev_cdf(p, x - h)) / (2 * h), 1e-7);
    EXPECT_NEAR(gev_log_pdf(p, x), std::log(gev_pdf(p, x)), 1e-13);
  }
}

TEST(Gev, SamplingKsAndSupport) {
  for (double gamma : {0.4, -0.4}) {
    const GevParams p(1.0, 2.0, gamma);
    const auto s = gev_sample(p, 100000, 17);
    for (double v : s) {
      if (gamma > 0) EXPECT_GT(v, p.endpoint());
      else EXPECT_LT(v, p.endpoint());
    }
    const double d = teststats::ks_statistic(s, [&](double x) { return gev_cdf(p, x); });
    EXPECT_GT(teststats::kolmogorov_pvalue(d, s.size()), 0.01) << gamma;
  }
}

TEST(Pwm, ConstantDataRejected) {
  const std::vector<double> flat{5, 5, 5, 5};
  EXPECT_EQ(code_of([&] { pwm_fit_gumbel(flat); }), ErrorCode::data);
  const std::vector<double> one{1.0};
  EXPECT_EQ(code_of([&] { pwm_fit_gumbel(one); }), ErrorCode::data);
}

TEST(Pwm, ExactQuantiles) {
  const std::size_t n = 1000;
  std::vector<double> x(n);
  for (std::size_t i = 1; i <= n; ++i)
    x[i - 1] = gumbel_quantile(GumbelParams(0, 1), (i - 0.375) / (n + 0.25));
  const auto fit = pwm_fit_gumbel(x);
  EXPECT_NEAR(fit.mu, 0.0, 0.02);
  EXPECT_NEAR(fit.sigma, 1.0, 0.02);
}

TEST(Pwm, MonteCarloConsistency) {
  const auto s = gumbel_sample(GumbelParams(10.0, 3.0), 100000, 99);
  const auto fit = pwm_fit_gumbel(s);
  // Asymptotic SEs of PWM: about 1.08 sigma / sqrt(n) (mu) and 0.79 sigma / sqrt(n) (sigma).
  const double root_n = std::sqrt(1e5);
  EXPECT_NEAR(fit.mu, 10.0, 3.0 * 1.1 * 3.0 / root_n);
  EXPECT_NEAR(fit.sigma, 3.0, 3.0 * 0.8 * 3.0 / root_n);
}

TEST(Pwm, Equivariance) {
  const auto s = gumbel_sample(GumbelParams(1.0, 2.0), 200, 3);
  const auto base = pwm_fit_gumbel(s);
  for (double a : {0.5, 4.0})
    for (double b : {-3.0, 100.0}) {
      std::vector<double> t(s.size());
      std::transform(s.begin(), s.end(), t.begin(), [&](double v) { return a * v + b; });
      const auto fit = pwm_fit_gumbel(t);
      EXPECT_NEAR(fit.mu, a * base.mu + b, 1e-12 * (1 + std::abs(b)));
      EXPECT_NEAR(fit.sigma, a * base.sigma, 1e-12 * a);
    }
  // Ordering of the input does not matter.
  std::vector<double> r(s.rbegin(), s.rend());
  EXPECT_NEAR(pwm_fit_gumbel(r).sigma, base.sigma, 1e-13);
}

TEST(PlotCoords, Examples) {
  const std::vector<double> one{7.0};
  const auto p1 = gumbel_plot_coords(one);
  ASSERT_EQ(p1.size(), 1u);
  EXPECT_EQ(p1[0].x, 7.0);
  EXPECT_NEAR(p1[0].y, 0.36651292058166435, 1e-15);

  const std::vector<double> two{2.0, 1.0};
  const auto p2 = gumbel_plot_coords(two);
  ASSERT_EQ(p2.size(), 2u);
  EXPECT_EQ(p2[0].x, 1.0);
  EXPECT_EQ(p2[1].x, 2.0);
  EXPECT_NEAR(p2[0].y, -std::log(-std::log(0.25)), 1e-15);
  EXPECT_NEAR(p2[1].y, -std::log(-std::log(0.75)), 1e-15);
}

TEST(PlotCoords, SlopeOfGumbelSample) {
  const auto s = gumbel_sample(GumbelParams(0, 1), 1000, 2);
  const auto pts = gumbel_plot_coords(s);
  EXPECT_TRUE(std::is_sorted(pts.begin(), pts.end(),
                             [](const PlotPoint& a, const PlotPoint& b) { return a.x < b.x; }));
  EXPECT_NEAR(ls_slope(pts), 1.0, 0.05);
}
