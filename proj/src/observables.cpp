#include "pinning/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "pinning/log_math.hpp"

namespace pinning {

namespace {

double concentration_scale(std::int64_t n, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  const double nn = static_cast<double>(n);
  return std::sqrt(nn * std::log(2.0 / delta)) / nn;
}

struct MeanSd {
  double mean = 0.0, sd = 0.0, se = 0.0;
};

template <class Get>
MeanSd mean_sd(std::span<const QuenchedEstimate> xs, Get get) {
  MeanSd out;
  if (xs.empty()) return out;
  for (const auto& x : xs) out.mean += get(x);
  out.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (const auto& x : xs) ss += (get(x) - out.mean) * (get(x) - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    out.se = out.sd / std::sqrt(static_cast<double>(xs.size()));
  }
  return out;
}

}  // namespace

QuenchedEstimate estimate_quenched(const PolymerParams& params, const ChargeSequence& charges,
                                   const InterArrivalLaw& law, double delta) {
  const auto log_z = build_free(params, charges, law);
  const Moments m = free_moments(params, charges, law);
  const double nn = static_cast<double>(params.n);
  QuenchedEstimate est;
  est.n = params.n;
  est.h = params.h;
  est.f_hat = log_z[static_cast<std::size_t>(params.n)] / nn;
  est.rho_hat = m.mean / nn;
  est.v_hat = std::max(0.0, m.variance) / nn;
  est.error_bar = concentration_scale(params.n, delta);
  return est;
}

QuenchedEstimate estimate_quenched(const DpTables& tables, double delta) {
  const double nn = static_cast<double>(tables.params.n);
  QuenchedEstimate est;
  est.n = tables.params.n;
  est.h = tables.params.h;
  est.f_hat = tables.log_z_free[static_cast<std::size_t>(tables.params.n)] / nn;
  est.rho_hat = tables.moments.mean / nn;
  est.v_hat = std::max(0.0, tables.moments.variance) / nn;
  est.error_bar = concentration_scale(tables.params.n, delta);
  return est;
}

ReplicaSummary aggregate(std::span<const QuenchedEstimate> replicas) {
  ReplicaSummary s;
  s.count = replicas.size();
  const auto f = mean_sd(replicas, [](const QuenchedEstimate& e) { return e.f_hat; });
  const auto r = mean_sd(replicas, [](const QuenchedEstimate& e) { return e.rho_hat; });
  const auto v = mean_sd(replicas, [](const QuenchedEstimate& e) { return e.v_hat; });
  s.f_mean = f.mean, s.f_stddev = f.sd, s.f_se = f.se;
  s.rho_mean = r.mean, s.rho_stddev = r.sd, s.rho_se = r.se;
  s.v_mean = v.mean, s.v_stddev = v.sd, s.v_se = v.se;
  return s;
}

std::int64_t GapReport::quantile(double q) const {
  if (samples == 0) throw std::logic_error("quantile of an empty report");
  const double target = std::clamp(q, 0.0, 1.0) * static_cast<double>(samples);
  std::uint64_t cum = 0;
  for (std::size_t m = 0; m < histogram.size(); ++m) {
    cum += histogram[m];
    if (cum > 0 && static_cast<double>(cum) >= target) return static_cast<std::int64_t>(m);
  }
  return static_cast<std::int64_t>(histogram.size()) - 1;
}

double GapReport::exceed_fraction(double c) const {
  if (samples == 0) return 0.0;
  const double cut = c * std::log(static_cast<double>(n));
  std::uint64_t hits = 0;
  for (std::size_t m = 0; m < histogram.size(); ++m)
    if (static_cast<double>(m) > cut) hits += histogram[m];
  return static_cast<double>(hits) / static_cast<double>(samples);
}

double GapReport::outside_fraction(double scale, double target, double eps) const {
  if (samples == 0) return 0.0;
  std::uint64_t hits = 0;
  for (std::size_t m = 0; m < histogram.size(); ++m)
    if (std::abs(static_cast<double>(m) / scale - target) > eps) hits += histogram[m];
  return static_cast<double>(hits) / static_cast<double>(samples);
}

GapAggregator::GapAggregator(std::int64_t n, std::uint64_t config_hash, std::int64_t l)
    : n_(n), l_(l), hash_(config_hash) {
  if (n < 1) throw std::invalid_argument("GapAggregator: n must be >= 1");
  hist_.assign(static_cast<std::size_t>(n) + 1, 0);
}

void GapAggregator::add(const RenewalPath& path, std::uint64_t config_hash) {
  if (config_hash != hash_) throw std::invalid_argument("GapAggregator: config hash mismatch");
  if (path.sites.empty() || path.n() != n_)
    throw std::invalid_argument("GapAggregator: path length " +
                                std::to_string(path.sites.empty() ? 0 : path.n()) +
                                " != " + std::to_string(n_));
  if (l_ >= 0 && path.contact_count() != l_)
    throw std::invalid_argument("GapAggregator: contact count mismatch");
  ++hist_[static_cast<std::size_t>(path.max_gap())];
  ++count_;
}

void GapAggregator::merge(const GapAggregator& other) {
  if (other.hash_ != hash_ || other.n_ != n_ || other.l_ != l_)
    throw std::invalid_argument("GapAggregator: cannot merge different configurations");
  for (std::size_t m = 0; m < hist_.size(); ++m) hist_[m] += other.hist_[m];
  count_ += other.count_;
}

GapReport GapAggregator::report() const {
  GapReport r;
  r.n = n_;
  r.l = l_;
  r.samples = count_;
  r.histogram = hist_;
  if (count_ == 0) return r;
  const double cnt = static_cast<double>(count_);
  double mean = 0.0;
  for (std::size_t m = 0; m < hist_.size(); ++m) mean += static_cast<double>(m * hist_[m]);
  mean /= cnt;
  double ss = 0.0;
  for (std::size_t m = 0; m < hist_.size(); ++m) {
    const double d = static_cast<double>(m) - mean;
    ss += d * d * static_cast<double>(hist_[m]);
  }
  r.mean = mean;
  r.stddev = count_ > 1 ? std::sqrt(ss / (cnt - 1.0)) : 0.0;
  return r;
}

GapReport gap_statistics(std::span<const RenewalPath> paths, std::uint64_t config_hash,
                         std::int64_t l) {
  if (paths.empty()) throw std::invalid_argument("gap_statistics: empty stream");
  GapAggregator agg(paths.front().n(), config_hash, l);
  for (const auto& p : paths) agg.add(p, config_hash);
  return agg.report();
}

double window_density_max(const RenewalPath& path, std::int64_t w) {
  const std::int64_t n = path.n();
  if (w < 1 || w > n) throw std::invalid_argument("window_density_max: need 1 <= w <= n");
  // prefix[j] = number of contacts in 1..j
  std::vector<std::int64_t> prefix(static_cast<std::size_t>(n) + 1, 0);
  for (std::size_t k = 1; k < path.sites.size(); ++k)
    prefix[static_cast<std::size_t>(path.sites[k])] = 1;
  for (std::int64_t j = 1; j <= n; ++j)
    prefix[static_cast<std::size_t>(j)] += prefix[static_cast<std::size_t>(j - 1)];
  const double c = static_cast<double>(path.contact_count()) / static_cast<double>(n);

  // A window of length >= 2w splits into two windows of length >= w whose
  // densities bracket its own, so lengths w..2w-1 carry both extremes.
  const std::int64_t top = std::min(n, 2 * w - 1);
  double best = 0.0;
  for (std::int64_t len = w; len <= top; ++len) {
    std::int64_t lo = len + 1, hi = -1;
    for (std::int64_t i = 0; i + len <= n; ++i) {
      const std::int64_t k =
          prefix[static_cast<std::size_t>(i + len)] - prefix[static_cast<std::size_t>(i)];
      lo = std::min(lo, k);
      hi = std::max(hi, k);
    }
    const double inv = 1.0 / static_cast<double>(len);
    best = std::max({best, std::abs(static_cast<double>(hi) * inv - c),
                     std::abs(static_cast<double>(lo) * inv - c)});
  }
  return best;
}

std::int64_t default_window(std::int64_t n) {
  const double w = std::ceil(std::pow(std::log(static_cast<double>(n)), 1.5));
  return std::clamp<std::int64_t>(static_cast<std::int64_t>(w), 1, n);
}

double lclt_residual(std::span<const double> distribution, double mean, double v_hat) {
  if (!(v_hat > 0.0)) throw std::invalid_argument("lclt_residual: v_hat must be positive");
  if (distribution.empty()) throw std::invalid_argument("lclt_residual: empty distribution");
  const double n = static_cast<double>(distribution.size() - 1);
  const double vn = v_hat * n;
  const double scale = std::sqrt(2.0 * std::numbers::pi * vn);
  double sup = 0.0;
  for (std::size_t l = 0; l < distribution.size(); ++l) {
    const double d = static_cast<double>(l) - mean;
    sup = std::max(sup, std::abs(scale * distribution[l] - std::exp(-d * d / (2.0 * vn))));
  }
  return sup;
}

RatePoint empirical_rate(std::span<const double> log_law, double r) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("empirical_rate: r must lie in (0, 1)");
  if (log_law.size() < 2) throw std::invalid_argument("empirical_rate: empty law");
  RatePoint p;
  p.n = static_cast<std::int64_t>(log_law.size()) - 1;
  p.r = r;
  p.l = static_cast<std::int64_t>(std::floor(r * static_cast<double>(p.n) + 1e-9));
  const double lp = log_law[static_cast<std::size_t>(p.l)];
  p.feasible = p.l >= 1 && std::isfinite(lp);
  p.value = p.feasible ? -lp / static_cast<double>(p.n) : kInf;
  return p;
}

std::vector<RatePoint> empirical_rate(std::span<const ConstrainedTable> ladder, double h,
                                      double r) {
  std::vector<RatePoint> out;
  out.reserve(ladder.size());
  for (const auto& t : ladder) out.push_back(empirical_rate(ln_log_distribution(t, h), r));
  return out;
}

std::vector<double> second_differences(std::span<const double> values, double dr) {
  std::vector<double> out;
  if (values.size() < 3) return out;
  for (std::size_t i = 1; i + 1 < values.size(); ++i)
    out.push_back((values[i - 1] - 2.0 * values[i] + values[i + 1]) / (dr * dr));
  return out;
}

}  // namespace pinning
