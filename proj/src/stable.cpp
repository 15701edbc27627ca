#include "stablemix/stable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "stablemix/error.hpp"
#include "stablemix/numeric.hpp"

namespace stablemix {

namespace {

constexpr double kPi = std::numbers::pi;
const double kLogXMin = std::log(1e-300);
const double kLogXMax = std::log(1e300);

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    fail(ErrorCode::invalid_argument,
         "stable index alpha must lie in (0, 1], got " + std::to_string(alpha));
}

void check_log_x(double log_x) {
  if (std::isnan(log_x) || log_x < kLogXMin || log_x > kLogXMax)
    fail(ErrorCode::out_of_range, "stable law evaluated outside [1e-300, 1e300]");
}

double checked_log(double x) {
  if (!(x > 0.0)) fail(ErrorCode::invalid_argument, "stable law evaluated at nonpositive x");
  return std::log(x);
}

// Zolotarev's integral representation for the one-sided law. With
//   a(u) = [sin(alpha u) / sin u]^(1/(1-alpha)) [sin((1-alpha)u) / sin(alpha u)]
// and g(u) = a(u) x^(-alpha/(1-alpha)), for u in (0, pi):
//   F(x) = (1/pi) int exp(-g),  f(x) = alpha / ((1-alpha) pi x) int g exp(-g).
// g is increasing in u, from g(0+) up to +inf at pi.
class Zolotarev {
 public:
  Zolotarev(double alpha, double log_x)
      : alpha_(alpha),
        ratio_(alpha / (1.0 - alpha)),
        inv_(1.0 / (1.0 - alpha)),
        log_x_(log_x),
        log_g0_(ratio_ * std::log(alpha) + std::log1p(-alpha) - ratio_ * log_x) {}

  double log_g(double u) const {
    return ratio_ * std::log(std::sin(alpha_ * u)) + std::log(std::sin((1.0 - alpha_) * u)) -
           inv_ * std::log(std::sin(u)) - ratio_ * log_x_;
  }
  double log_g0() const { return log_g0_; }
  double ratio() const { return ratio_; }

  // Smallest u with log_g(u) >= target (0 when already satisfied at u = 0+).
  double solve(double target) const {
    if (log_g0_ >= target) return 0.0;
    double lo = 0.0;
    double hi = kPi;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * kPi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (log_g(mid) < target)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }

  // Breakpoints in (0, pi) at the given g levels (as logs), sorted, plus ends.
  std::vector<double> breakpoints(std::initializer_list<double> log_levels, double end) const {
    std::vector<double> pts{0.0, end};
    for (double lv : log_levels) {
      const double u = solve(lv);
      if (u > 0.0 && u < end) pts.push_back(u);
    }
    for (int k = 1; k <= 14; ++k) {
      const double lv = -k * std::numbers::ln10;
      if (lv <= log_g0_) break;
      const double u = solve(lv);
      if (u > 0.0 && u < end) pts.push_back(u);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
  }

 private:
  double alpha_;
  double ratio_;
  double inv_;
  double log_x_;
  double log_g0_;
};

// Globally adaptive Gauss-Kronrod: repeatedly bisect the subinterval with the
// largest error estimate until the summed error is below rel_tol * |total|.
template <class F>
double integrate_pieces(F f, const std::vector<double>& pts, double rel_tol = 1e-13) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  struct Piece {
    double a, b, value, error;
  };
  auto eval = [&](double a, double b) {
    double err = 0.0;
    const double v = Rule::integrate(f, a, b, 0, 0.0, &err);
    return Piece{a, b, v, err};
  };
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (pts[i + 1] > pts[i]) pieces.push_back(eval(pts[i], pts[i + 1]));
  auto by_error = [](const Piece& l, const Piece& r) { return l.error < r.error; };
  std::make_heap(pieces.begin(), pieces.end(), by_error);
  for (int it = 0; it < 2000 && !pieces.empty(); ++it) {
    CompensatedSum total, error;
    for (const auto& p : pieces) {
      total.add(p.value);
      error.add(p.error);
    }
    if (error.value() <= rel_tol * std::abs(total.value()) + 1e-300) break;
    std::pop_heap(pieces.begin(), pieces.end(), by_error);
    const Piece worst = pieces.back();
    pieces.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      pieces.push_back({worst.a, worst.b, worst.value, 0.0});
      std::push_heap(pieces.begin(), pieces.end(), by_error);
      continue;
    }
    for (const Piece& half : {eval(worst.a, mid), eval(mid, worst.b)}) {
      pieces.push_back(half);
      std::push_heap(pieces.begin(), pieces.end(), by_error);
    }
  }
  CompensatedSum total;
  for (const auto& p : pieces) total.add(p.value);
  return total.value();
}

// A g level beyond which exp(-(g - shift)) is negligible.
constexpr double kCutoff = 60.0;

}  // namespace

StableLaw::StableLaw(double alpha) : alpha_(alpha) { check_alpha(alpha); }

ExpSParams::ExpSParams(double alpha, double mu, double sigma)
    : law_(alpha), mu_(mu), sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    fail(ErrorCode::invalid_argument, "ExpS scale sigma must be positive");
  if (!std::isfinite(mu)) fail(ErrorCode::invalid_argument, "ExpS location mu must be finite");
}

double draw_log_stable(const StableLaw& law, Rng& rng) {
  const double a = law.alpha();
  if (law.degenerate()) return 0.0;
  const double u = kPi * rng.uniform();
  const double w = rng.exponential();
  const double b = (1.0 - a) / a;
  return std::log(std::sin(a * u)) + b * std::log(std::sin((1.0 - a) * u)) -
         std::log(std::sin(u)) / a - b * std::log(w);
}

std::vector<double> sample_stable(const StableLaw& law, std::size_t n, std::uint64_t seed) {
  std::vector<double> out(n, 1.0);
  if (law.degenerate()) return out;
  Rng rng(seed);
  for (auto& v : out) v = std::exp(draw_log_stable(law, rng));
  return out;
}

namespace detail {

double stable_log_pdf_at_log(double alpha, double log_x) {
  check_alpha(alpha);
  if (alpha == 1.0)
    fail(ErrorCode::degenerate_law, "alpha = 1 is a point mass at 1 and has no density");
  check_log_x(log_x);
  const Zolotarev z(alpha, log_x);
  const double lg0 = z.log_g0();
  if (lg0 > 700.0) return kNegInf;  // density below exp(-1e304)
  const double g0 = std::exp(lg0);
  const double shift = g0 > 1.0 ? g0 : 0.0;
  const double end = z.solve(std::log(shift + kCutoff));
  const auto pts = z.breakpoints({0.0, std::log(shift + 1.0), std::log(shift + 10.0)}, end);
  // g exp(-(g - shift)), with g - shift written as g0 * expm1(lg - lg0) when shifted.
  auto integrand = [&](double u) {
    const double lg = z.log_g(u);
    const double excess = shift > 0.0 ? g0 * std::expm1(lg - lg0) : std::exp(lg);
    return std::exp(lg - excess);
  };
  const double integral = integrate_pieces(integrand, pts);
  if (!(integral > 0.0)) return kNegInf;
  return std::log(z.ratio()) - std::log(kPi) - log_x - shift + std::log(integral);
}

double stable_cdf_at_log(double alpha, double log_x) {
  check_alpha(alpha);
  if (std::isnan(log_x)) fail(ErrorCode::invalid_argument, "stable cdf evaluated at NaN");
  if (alpha == 1.0) return log_x >= 0.0 ? 1.0 : 0.0;
  check_log_x(log_x);
  const Zolotarev z(alpha, log_x);
  const double lg0 = z.log_g0();
  if (lg0 > 700.0) return 0.0;
  // Deep right tail: g0 underflows and the shifted integrand turns into 0 * inf.
  if (lg0 < -3.0) return 1.0 - stable_sf_at_log(alpha, log_x);
  const double g0 = std::exp(lg0);
  const double end = z.solve(std::log(g0 + kCutoff));
  const auto pts = z.breakpoints({std::log(g0 + 1.0), std::log(g0 + 10.0)}, end);
  auto integrand = [&](double u) { return std::exp(-g0 * std::expm1(z.log_g(u) - lg0)); };
  const double integral = integrate_pieces(integrand, pts);
  return std::clamp(std::exp(-g0) * integral / kPi, 0.0, 1.0);
}

double stable_sf_at_log(double alpha, double log_x) {
  check_alpha(alpha);
  if (std::isnan(log_x)) fail(ErrorCode::invalid_argument, "stable sf evaluated at NaN");
  if (alpha == 1.0) return log_x >= 0.0 ? 0.0 : 1.0;
  check_log_x(log_x);
  const Zolotarev z(alpha, log_x);
  if (z.log_g0() > 3.0) return 1.0 - stable_cdf_at_log(alpha, log_x);
  const auto pts = z.breakpoints({0.0, std::log(10.0)}, kPi);
  auto integrand = [&](double u) { return -std::expm1(-std::exp(z.log_g(u))); };
  return std::clamp(integrate_pieces(integrand, pts) / kPi, 0.0, 1.0);
}

double stable_quantile_log(double alpha, double q) {
  check_alpha(alpha);
  if (!(q > 0.0 && q < 1.0)) fail(ErrorCode::invalid_argument, "quantile level must lie in (0, 1)");
  if (alpha == 1.0) return 0.0;

  const bool upper = q > 0.5;
  const double target = upper ? 1.0 - q : q;
  // Increasing in y = log x, zero at the quantile.
  auto h = [&](double y) {
    return upper ? target - stable_sf_at_log(alpha, y) : stable_cdf_at_log(alpha, y) - target;
  };

  double y0 = 0.0;
  if (alpha == 0.5) {
    const double e = boost::math::erfc_inv(q);
    y0 = -std::log(4.0 * e * e);
  } else if (upper) {
    y0 = (std::log(stable_tail_constant(alpha)) - std::log(target)) / alpha;
  }
  y0 = std::clamp(y0, kLogXMin + 1.0, kLogXMax - 1.0);

  double lo = y0 - 0.5, hi = y0 + 0.5;
  double step = 1.0;
  double h_lo = h(lo);
  while (h_lo > 0.0) {
    if (lo <= kLogXMin) fail(ErrorCode::out_of_range, "stable quantile below 1e-300");
    hi = lo;
    lo = std::max(lo - step, kLogXMin);
    step *= 2.0;
    h_lo = h(lo);
  }
  step = 1.0;
  double h_hi = h(hi);
  while (h_hi < 0.0) {
    if (hi >= kLogXMax) fail(ErrorCode::out_of_range, "stable quantile above 1e300");
    lo = hi;
    h_lo = h_hi;
    hi = std::min(hi + step, kLogXMax);
    step *= 2.0;
    h_hi = h(hi);
  }

  const double tol = 1e-14 + 1e-11 * target;
  // Bisection to a narrow bracket, then Illinois-safeguarded secant steps.
  while (hi - lo > 1e-2) {
    const double mid = 0.5 * (lo + hi);
    const double hm = h(mid);
    if (std::abs(hm) <= tol) return mid;
    if (hm < 0.0) {
      lo = mid;
      h_lo = hm;
    } else {
      hi = mid;
      h_hi = hm;
    }
  }
  int side = 0;
  for (int it = 0; it < 100; ++it) {
    double y = (h_hi - h_lo) != 0.0 ? lo - h_lo * (hi - lo) / (h_hi - h_lo) : 0.5 * (lo + hi);
    if (!(y > lo && y < hi)) y = 0.5 * (lo + hi);
    const double hy = h(y);
    if (std::abs(hy) <= tol || hi - lo <= 4e-16 * std::max(1.0, std::abs(y))) return y;
    if (hy < 0.0) {
      lo = y;
      h_lo = hy;
      if (side == -1) h_hi *= 0.5;
      side = -1;
    } else {
      hi = y;
      h_hi = hy;
      if (side == 1) h_lo *= 0.5;
      side = 1;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

double stable_log_pdf(const StableLaw& law, double x) {
  return detail::stable_log_pdf_at_log(law.alpha(), checked_log(x));
}

double stable_pdf(const StableLaw& law, double x) { return std::exp(stable_log_pdf(law, x)); }

double stable_cdf(const StableLaw& law, double x) {
  if (!(x > 0.0)) fail(ErrorCode::invalid_argument, "stable cdf evaluated at nonpositive x");
  return detail::stable_cdf_at_log(law.alpha(), std::log(x));
}

double stable_sf(const StableLaw& law, double x) {
  if (!(x > 0.0)) fail(ErrorCode::invalid_argument, "stable sf evaluated at nonpositive x");
  return detail::stable_sf_at_log(law.alpha(), std::log(x));
}

double stable_quantile(const StableLaw& law, double q) {
  return std::exp(detail::stable_quantile_log(law.alpha(), q));
}

double stable_tail_constant(double alpha) {
  check_alpha(alpha);
  return std::tgamma(alpha) * std::sin(kPi * alpha) / kPi;
}

double exps_log_pdf(const ExpSParams& p, double x) {
  if (p.law().degenerate())
    fail(ErrorCode::degenerate_law, "ExpS with alpha = 1 is a point mass and has no density");
  const double y = (x - p.mu()) / p.sigma();
  return y + detail::stable_log_pdf_at_log(p.alpha(), y) - std::log(p.sigma());
}

double exps_pdf(const ExpSParams& p, double x) { return std::exp(exps_log_pdf(p, x)); }

double exps_cdf(const ExpSParams& p, double x) {
  if (std::isinf(x)) return x > 0.0 ? 1.0 : 0.0;
  return detail::stable_cdf_at_log(p.alpha(), (x - p.mu()) / p.sigma());
}

double exps_sf(const ExpSParams& p, double x) {
  if (std::isinf(x)) return x > 0.0 ? 0.0 : 1.0;
  return detail::stable_sf_at_log(p.alpha(), (x - p.mu()) / p.sigma());
}

double exps_quantile(const ExpSParams& p, double q) {
  return p.mu() + p.sigma() * detail::stable_quantile_log(p.alpha(), q);
}

Moments exps_moments(const ExpSParams& p) {
  const double a = p.alpha();
  const double s = p.sigma();
  return {p.mu() + s * kEulerGamma * (1.0 / a - 1.0),
          std::numbers::pi * std::numbers::pi * s * s / 6.0 * (1.0 / (a * a) - 1.0)};
}

}  // namespace stablemix
