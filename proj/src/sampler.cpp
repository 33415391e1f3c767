#include "pinning/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pinning/log_math.hpp"

namespace pinning {

namespace {

struct Draw {
  std::int64_t index;
  double log_prob;
};

// Inverse-CDF draw over candidates lo..hi whose log-probabilities come from
// log_prob_of and should sum to one. Candidates are scanned upward lazily.
// A short total from rounding is renormalized; an underflowing total falls
// back to Gumbel-max on the normalized weights.
template <class F>
Draw draw_lazy(std::int64_t lo, std::int64_t hi, F&& log_prob_of, JobRng& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  for (std::int64_t i = lo; i <= hi; ++i) {
    const double lp = log_prob_of(i);
    cum += std::exp(lp);
    if (u < cum) return {i, lp};
  }
  if (cum > 0.5) {
    const double target = u * cum;
    const double log_total = std::log(cum);
    double c = 0.0;
    std::int64_t last = lo;
    for (std::int64_t i = lo; i <= hi; ++i) {
      const double lp = log_prob_of(i);
      if (lp == kNegInf) continue;
      last = i;
      c += std::exp(lp);
      if (target < c) return {i, lp - log_total};
    }
    return {last, log_prob_of(last) - log_total};
  }
  LogSumAccumulator total;
  for (std::int64_t i = lo; i <= hi; ++i) total.add(log_prob_of(i));
  const double log_total = total.value();
  if (log_total == kNegInf) throw std::logic_error("transition with no admissible move");
  std::int64_t best = lo;
  double best_key = kNegInf;
  for (std::int64_t i = lo; i <= hi; ++i) {
    const double lp = log_prob_of(i);
    if (lp == kNegInf) continue;
    const double key = lp - log_total + rng.gumbel();
    if (key > best_key) {
      best_key = key;
      best = i;
    }
  }
  return {best, log_prob_of(best) - log_total};
}

Draw draw_from_log_probs(std::span<const double> log_probs, JobRng& rng) {
  return draw_lazy(
      0, static_cast<std::int64_t>(log_probs.size()) - 1,
      [&](std::int64_t i) { return log_probs[static_cast<std::size_t>(i)]; }, rng);
}

void finish(RenewalPath& path) {
  path.sites.push_back(0);
  std::reverse(path.sites.begin(), path.sites.end());
}

}  // namespace

RenewalPath sample_free(std::span<const double> log_z_free, const PolymerParams& params,
                        const ChargeSequence& charges, const InterArrivalLaw& law, JobRng& rng) {
  const std::int64_t n = params.n;
  if (static_cast<std::int64_t>(log_z_free.size()) != n + 1 || log_z_free[0] != 0.0 ||
      !std::isfinite(log_z_free.back())) {
    throw std::invalid_argument("sample_free: malformed free table");
  }
  if (charges.length() < n) throw std::invalid_argument("sample_free: charges shorter than n");
  RenewalPath path;
  std::int64_t m = n;
  while (m > 0) {
    path.sites.push_back(m);
    const double base = params.h + charges[m] - log_z_free[static_cast<std::size_t>(m)];
    const auto d = draw_lazy(
        1, std::min(m, law.support()),
        [&](std::int64_t t) {
          return law.log_p(t) + log_z_free[static_cast<std::size_t>(m - t)] + base;
        },
        rng);
    path.log_prob += d.log_prob;
    m -= d.index;
  }
  finish(path);
  return path;
}

RenewalPath sample_conditioned(const ConstrainedTable& table, std::int64_t n, std::int64_t l,
                               const ChargeSequence& charges, const InterArrivalLaw& law,
                               JobRng& rng) {
  if (table.n() != n) throw std::invalid_argument("sample_conditioned: table built for another n");
  if (l < 1 || l > n) {
    throw InfeasibleError("contact count " + std::to_string(l) + " infeasible for n = " +
                          std::to_string(n));
  }
  if (l > table.l_max() || (table.target() && *table.target() != l)) {
    throw std::invalid_argument("sample_conditioned: table does not cover l = " +
                                std::to_string(l));
  }
  if (table.log_z(n, l) == kNegInf) {
    throw InfeasibleError("Z_{n,l} = 0 for n = " + std::to_string(n) +
                          ", l = " + std::to_string(l));
  }
  RenewalPath path;
  std::int64_t m = n;
  for (std::int64_t k = l; k >= 1; --k) {
    path.sites.push_back(m);
    const double base = charges[m] - table.log_z(m, k);
    const std::int64_t t_lo = std::max<std::int64_t>(1, m - table.hi(k - 1));
    const std::int64_t t_hi = std::min(law.support(), m - (k - 1));
    const auto d = draw_lazy(
        t_lo, t_hi,
        [&](std::int64_t t) { return law.log_p(t) + table.log_z(m - t, k - 1) + base; }, rng);
    path.log_prob += d.log_prob;
    m -= d.index;
  }
  if (m != 0) throw std::logic_error("conditioned sampler did not return to the origin");
  finish(path);
  return path;
}

std::vector<double> soft_count_law(const ConstrainedTable& table, double r, Side side, double h) {
  auto log_law = ln_log_distribution(table, h);
  const double rn = r * static_cast<double>(table.n());
  // Snap r n to an integer when it is one up to rounding.
  const double snapped = std::abs(rn - std::round(rn)) < 1e-9 ? std::round(rn) : rn;
  for (std::size_t l = 0; l < log_law.size(); ++l) {
    const double lv = static_cast<double>(l);
    const bool keep = side == Side::at_least ? lv >= snapped : lv <= snapped;
    if (!keep) log_law[l] = kNegInf;
  }
  const double total = log_sum_exp(log_law);
  if (total == kNegInf) throw InfeasibleError("soft conditioning event is empty");
  for (double& x : log_law) x -= total;
  return log_law;
}

RenewalPath sample_soft(const ConstrainedTable& table, std::int64_t n, double r, Side side,
                        double h, const ChargeSequence& charges, const InterArrivalLaw& law,
                        JobRng& rng) {
  if (table.n() != n) throw std::invalid_argument("sample_soft: table built for another n");
  const auto count_law = soft_count_law(table, r, side, h);
  const auto d = draw_from_log_probs(count_law, rng);
  auto path = sample_conditioned(table, n, d.index, charges, law, rng);
  path.log_prob += d.log_prob;
  return path;
}

std::vector<double> umodel_count_law(const ConstrainedTable& table, const DensityPotential& u) {
  if (!table.complete()) throw std::invalid_argument("U-model needs a complete table");
  const std::int64_t n = table.n();
  const double nd = static_cast<double>(n);
  std::vector<double> w(static_cast<std::size_t>(n + 1), kNegInf);
  for (std::int64_t l = 1; l <= n; ++l) {
    const double lz = table.log_z(n, l);
    if (lz == kNegInf) continue;
    const double uv = u(static_cast<double>(l) / nd);
    if (!std::isfinite(uv)) {
      throw std::invalid_argument("U is not finite at density " + std::to_string(l / nd));
    }
    w[static_cast<std::size_t>(l)] = nd * uv + lz;
  }
  const double total = log_sum_exp(w);
  for (double& x : w) x -= total;
  return w;
}

RenewalPath sample_umodel(const ConstrainedTable& table, std::int64_t n, const DensityPotential& u,
                          const ChargeSequence& charges, const InterArrivalLaw& law, JobRng& rng) {
  if (table.n() != n) throw std::invalid_argument("sample_umodel: table built for another n");
  const auto count_law = umodel_count_law(table, u);
  const auto d = draw_from_log_probs(count_law, rng);
  auto path = sample_conditioned(table, n, d.index, charges, law, rng);
  path.log_prob += d.log_prob;
  return path;
}

double conditioned_log_prob(const RenewalPath& path, const ConstrainedTable& table,
                            const ChargeSequence& charges, const InterArrivalLaw& law) {
  return log_path_weight(path, 0.0, charges, law) - table.log_z(path.n(), path.contact_count());
}

}  // namespace pinning
