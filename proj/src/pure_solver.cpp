#include "pinning/pure_solver.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pinning/log_math.hpp"

namespace pinning {

namespace {

constexpr std::uintmax_t kMaxRootIterations = 400;

// Both ends within a few ulps.
struct TightTolerance {
  bool operator()(double a, double b) const {
    return std::abs(a - b) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
  }
};

}  // namespace

std::string to_string(GapRegime regime) {
  switch (regime) {
    case GapRegime::big_jump: return "big_jump";
    case GapRegime::log_gap: return "log_gap";
    case GapRegime::boundary: return "boundary";
  }
  return "?";
}

double solve_f(const InterArrivalLaw& law, double h) {
  if (!std::isfinite(h)) throw std::invalid_argument("solve_f: h must be finite");
  if (h <= 0.0) return 0.0;
  double lo = std::max(0.0, h + law.log_p(1));
  double hi = h;
  if (hi - lo <= 0.0) return h;
  auto g = [&](double phi) { return law.log_series(0, phi) + h; };
  const double g_lo = lo == 0.0 ? h : g(lo);
  const double g_hi = g(hi);
  if (g_lo <= 0.0) return lo;
  if (g_hi >= 0.0) return hi;
  std::uintmax_t iters = kMaxRootIterations;
  const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, g_lo, g_hi, TightTolerance{}, iters);
  return 0.5 * (a + b);
}

PureCurves::PureCurves(InterArrivalLaw law) : law_(std::move(law)) {
  const double mean = mean_T(law_);
  rho_c_ = std::isfinite(mean) ? 1.0 / mean : 0.0;
}

double PureCurves::rho(double h) const {
  if (!(h > 0.0)) throw std::domain_error("contact density defined for h > 0 only");
  const double f = solve_f(law_, h);
  return std::exp(law_.log_series(0, f) - law_.log_series(1, f));
}

double PureCurves::iota_rho(double r) const {
  if (!(r > rho_c_ && r < 1.0)) {
    throw std::domain_error("iota_rho: r must lie in (rho_c, 1)");
  }
  auto g = [&](double h) { return (h == 0.0 ? rho_c_ : rho(h)) - r; };
  double lo = 0.0;
  double hi = 1.0;
  double g_hi = g(hi);
  while (g_hi < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw std::domain_error("iota_rho: r too close to 1");
    g_hi = g(hi);
  }
  const double g_lo = g(lo);
  if (g_hi == 0.0) return hi;
  std::uintmax_t iters = kMaxRootIterations;
  const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, g_lo, g_hi, TightTolerance{}, iters);
  return 0.5 * (a + b);
}

double PureCurves::rate(double h, double r) const {
  if (!(r >= 0.0 && r <= 1.0)) return kInf;
  const double fh = f(h);
  if (r == 1.0) return fh - h - law_.log_p(1);
  if (r <= rho_c_) return r == 0.0 ? fh : r * (h_c() - h) + fh;
  const double k = iota_rho(r);
  return r * (k - h) - f(k) + fh;
}

GapPrediction PureCurves::predict_gaps(double r) const {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("predict_gaps: r must lie in (0, 1)");
  if (std::abs(r - rho_c_) <= 1e-12) {
    return {GapRegime::boundary, std::numeric_limits<double>::quiet_NaN()};
  }
  if (r < rho_c_) return {GapRegime::big_jump, 1.0 - r / rho_c_};
  return {GapRegime::log_gap, 1.0 / f(iota_rho(r))};
}

std::vector<double> log_convolve_S(const InterArrivalLaw& law, std::int64_t l, std::int64_t n_max) {
  if (l < 1) throw std::invalid_argument("convolve_S: l must be >= 1");
  if (n_max < l) throw std::invalid_argument("convolve_S: n_max must be >= l");
  if (l > kConvolutionGuard / n_max) {
    throw std::length_error("convolve_S: l * n_max exceeds the work guard");
  }
  const auto log_p = law.log_p_upto(n_max);
  const std::int64_t t_sup = static_cast<std::int64_t>(log_p.size()) - 1;
  const auto size = static_cast<std::size_t>(n_max + 1);
  std::vector<double> cur(size, kNegInf), next(size, kNegInf);
  cur[0] = 0.0;
  for (std::int64_t i = 1; i <= l; ++i) {
    for (std::int64_t m = 0; m <= n_max; ++m) {
      LogSumAccumulator acc;
      // S_{i-1} >= i - 1, so t <= m - (i - 1).
      const std::int64_t t_hi = std::min(t_sup, m - (i - 1));
      for (std::int64_t t = 1; t <= t_hi; ++t) {
        acc.add(log_p[static_cast<std::size_t>(t)] + cur[static_cast<std::size_t>(m - t)]);
      }
      next[static_cast<std::size_t>(m)] = acc.value();
    }
    std::swap(cur, next);
  }
  return cur;
}

std::vector<double> convolve_S(const InterArrivalLaw& law, std::int64_t l, std::int64_t n_max) {
  auto v = log_convolve_S(law, l, n_max);
  for (double& x : v) x = std::exp(x);
  return v;
}

}  // namespace pinning
