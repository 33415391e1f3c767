#include "pinning/renewal_law.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pinning/log_math.hpp"

namespace pinning {

namespace {

// Terms with t below this are summed directly; the rest goes through
// Euler-Maclaurin with a first-derivative correction.
constexpr std::int64_t kDirectTerms = 4096;
constexpr std::size_t kTableSize = 1 << 16;
constexpr double kTailTarget = 1e-14;
constexpr double kQuadTol = 1e-14;

}  // namespace

std::string to_string(EllKind kind) {
  switch (kind) {
    case EllKind::constant: return "constant";
    case EllKind::log_power: return "log_power";
    case EllKind::table: return "table";
  }
  return "?";
}

EllKind ell_kind_from_string(const std::string& name) {
  if (name == "constant") return EllKind::constant;
  if (name == "log_power") return EllKind::log_power;
  if (name == "table") return EllKind::table;
  throw std::invalid_argument("unknown ell kind '" + name + "'");
}

double InterArrivalLaw::log_weight(double t) const {
  const double c = spec_.ell_params[0];
  double lw = std::log(c) - (spec_.alpha + 1.0) * std::log(t);
  if (spec_.ell_kind == EllKind::log_power) lw += spec_.ell_params[1] * std::log1p(std::log(t));
  return lw;
}

bool InterArrivalLaw::diverges(int k, double phi) const {
  if (bounded() || phi > 0.0) return false;
  const double a = spec_.alpha;
  if (k < a) return false;
  if (k > a) return true;
  return !(spec_.ell_kind == EllKind::log_power && spec_.ell_params[1] < -1.0);
}

double InterArrivalLaw::raw_series(int k, double phi, double log_scale) const {
  if (spec_.ell_kind == EllKind::table) {
    CompensatedSum s;
    for (std::size_t i = 0; i < table_weights_.size(); ++i) {
      const double t = static_cast<double>(i + 1);
      s.add(std::pow(t, k) * table_weights_[i] * std::exp(-phi * (t - 1.0) - log_scale));
    }
    return s.value();
  }
  const std::int64_t last = spec_.t_max.value_or(std::numeric_limits<std::int64_t>::max());
  auto term = [&](double x) {
    return std::exp(k * std::log(x) + log_weight(x) - log_scale - phi * (x - 1.0));
  };
  CompensatedSum s;
  const std::int64_t direct_end = std::min(last, kDirectTerms - 1);
  const double peak = phi > 0.0 ? (k - spec_.alpha - 1.0) / phi : kInf;
  for (std::int64_t t = 1; t <= direct_end; ++t) {
    const double x = static_cast<double>(t);
    const double v = term(x);
    s.add(v);
    if (phi > 0.0 && x > peak && v < 1e-20 * s.value()) return s.value();
  }
  if (last <= direct_end) return s.value();

  // Euler-Maclaurin remainder over [N, last].
  const double n0 = static_cast<double>(kDirectTerms);
  const double beta = spec_.ell_kind == EllKind::log_power ? spec_.ell_params[1] : 0.0;
  auto dlog = [&](double x) {
    return (k - spec_.alpha - 1.0) / x + beta / (x * (1.0 + std::log(x))) - phi;
  };
  auto in_log_space = [&](double u) {
    double e = (k - spec_.alpha) * u + std::log(spec_.ell_params[0]) + beta * std::log1p(u) - log_scale;
    if (phi > 0.0) e -= phi * std::expm1(u);
    return std::exp(e);
  };
  double integral = 0.0;
  const double u0 = std::log(n0);
  if (spec_.t_max) {
    const double u1 = std::log(static_cast<double>(last));
    boost::math::quadrature::tanh_sinh<double> ts;
    integral = ts.integrate(in_log_space, u0, u1, kQuadTol);
    const double xl = static_cast<double>(last);
    integral += 0.5 * (term(n0) + term(xl)) - (term(n0) * dlog(n0) - term(xl) * dlog(xl)) / 12.0;
    return s.value() + integral;
  }
  boost::math::quadrature::exp_sinh<double> es;
  double split = u0;
  if (phi > 0.0 && std::log(1.0 / phi) > u0) {
    split = std::log(1.0 / phi);
    boost::math::quadrature::tanh_sinh<double> ts;
    integral += ts.integrate(in_log_space, u0, split, kQuadTol);
  }
  integral += es.integrate(in_log_space, split, kInf, kQuadTol);
  integral += 0.5 * term(n0) - term(n0) * dlog(n0) / 12.0;
  return s.value() + integral;
}

InterArrivalLaw InterArrivalLaw::build(const LawSpec& spec) {
  if (!(spec.alpha >= 1.0) || !std::isfinite(spec.alpha)) {
    throw std::invalid_argument("alpha must be >= 1 (got " + std::to_string(spec.alpha) + ")");
  }
  InterArrivalLaw law;
  law.spec_ = spec;

  if (spec.ell_kind == EllKind::table) {
    if (spec.ell_params.empty()) throw std::invalid_argument("table law needs at least one weight");
    for (double w : spec.ell_params) {
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw std::invalid_argument("table weights must be positive and finite");
      }
    }
    const auto k = static_cast<std::int64_t>(spec.ell_params.size());
    if (spec.t_max && *spec.t_max != k) {
      throw std::invalid_argument("table law: t_max must equal the number of weights");
    }
    law.spec_.t_max = k;
    law.table_weights_ = spec.ell_params;
    law.support_ = k;
    law.log_norm_ = std::log(law.raw_series(0, 0.0, 0.0));
    for (double w : spec.ell_params) law.table_.push_back(std::log(w) - law.log_norm_);
    return law;
  }

  const std::size_t needed = spec.ell_kind == EllKind::constant ? 1 : 2;
  if (spec.ell_params.size() != needed) {
    throw std::invalid_argument(to_string(spec.ell_kind) + " ell expects " +
                                std::to_string(needed) + " parameter(s)");
  }
  if (!(spec.ell_params[0] > 0.0) || !std::isfinite(spec.ell_params[0])) {
    throw std::invalid_argument("ell scale c must be positive");
  }
  if (spec.ell_kind == EllKind::log_power && !std::isfinite(spec.ell_params[1])) {
    throw std::invalid_argument("ell exponent beta must be finite");
  }
  if (spec.t_max && *spec.t_max < 2) throw std::invalid_argument("t_max must be >= 2");

  // Scale the raw sum by the first weight so that the series is O(1).
  const double scale = law.log_weight(1.0);
  law.log_norm_ = scale + std::log(law.raw_series(0, 0.0, scale));

  if (spec.t_max) {
    law.support_ = *spec.t_max;
  } else {
    // Certified cutoff: w is decreasing beyond x*, so the tail sum past T is
    // bounded by the integral of w over [T, inf).
    const double beta = spec.ell_kind == EllKind::log_power ? spec.ell_params[1] : 0.0;
    const double x_star = std::exp(beta / (spec.alpha + 1.0) - 1.0);
    const auto t_lo = std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(x_star)));
    boost::math::quadrature::exp_sinh<double> es;
    auto tail_bound = [&](std::int64_t t) {
      auto f = [&](double u) {
        return std::exp(-spec.alpha * u + std::log(spec.ell_params[0]) + beta * std::log1p(u) -
                        law.log_norm_);
      };
      return es.integrate(f, std::log(static_cast<double>(t)), kInf, 1e-10);
    };
    std::int64_t hi = t_lo;
    while (tail_bound(hi) >= kTailTarget) {
      if (hi > (std::int64_t{1} << 61)) throw std::invalid_argument("cannot certify a tail cutoff");
      hi *= 2;
    }
    std::int64_t lo = std::max(t_lo, hi / 2);
    if (tail_bound(lo) < kTailTarget) hi = lo;
    while (hi - lo > 1) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      (tail_bound(mid) < kTailTarget ? hi : lo) = mid;
    }
    law.support_ = hi;
    law.tail_mass_ = tail_bound(hi);
  }

  const auto n_tab = static_cast<std::size_t>(std::min<std::int64_t>(law.support_, kTableSize));
  law.table_.resize(n_tab);
  for (std::size_t i = 0; i < n_tab; ++i) {
    law.table_[i] = law.log_weight(static_cast<double>(i + 1)) - law.log_norm_;
  }
  return law;
}

double InterArrivalLaw::log_p(std::int64_t t) const {
  if (t < 1 || t > support_) return kNegInf;
  if (static_cast<std::size_t>(t) <= table_.size()) return table_[static_cast<std::size_t>(t - 1)];
  return log_weight(static_cast<double>(t)) - log_norm_;
}

double InterArrivalLaw::p(std::int64_t t) const { return std::exp(log_p(t)); }

double InterArrivalLaw::log_p_extended(double z) const {
  if (spec_.ell_kind == EllKind::table) {
    throw std::invalid_argument("tabulated laws have no continuous extension");
  }
  if (z < 1.0) throw std::invalid_argument("extension defined for z >= 1");
  return log_weight(z) - log_norm_;
}

std::vector<double> InterArrivalLaw::log_p_upto(std::int64_t t_hi) const {
  const std::int64_t hi = std::clamp<std::int64_t>(t_hi, 0, support_);
  std::vector<double> out(static_cast<std::size_t>(hi + 1), kNegInf);
  for (std::int64_t t = 1; t <= hi; ++t) out[static_cast<std::size_t>(t)] = log_p(t);
  return out;
}

double InterArrivalLaw::log_series(int k, double phi) const {
  if (diverges(k, phi)) return kInf;
  return -phi + std::log(raw_series(k, phi, log_norm_));
}

double InterArrivalLaw::series(int k, double phi) const { return std::exp(log_series(k, phi)); }

double mean_T(const InterArrivalLaw& law) { return law.series(1, 0.0); }

LaplaceMoments laplace_moments(const InterArrivalLaw& law, double phi) {
  if (!(phi >= 0.0)) throw std::invalid_argument("laplace_moments: phi must be >= 0");
  LaplaceMoments m;
  m.m0 = phi == 0.0 ? 1.0 : law.series(0, phi);
  if (const double v = law.series(1, phi); std::isfinite(v)) m.m1 = v;
  if (const double v = law.series(2, phi); std::isfinite(v)) m.m2 = v;
  return m;
}

}  // namespace pinning
