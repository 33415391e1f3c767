#include "pinning/dp_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pinning/log_math.hpp"

namespace pinning {

namespace {

// Block length for the scaled convolution of the constrained recursion.
constexpr std::size_t kBlock = 128;
// A block whose finite entries span more than this (in log units) is summed exactly.
constexpr double kWideRange = 600.0;
// Partial dot products below this are recomputed in log domain.
constexpr double kTinyDot = 1e-280;

void check_inputs(std::int64_t n, const ChargeSequence& charges) {
  if (n < 1) throw std::invalid_argument("system size n must be >= 1");
  if (charges.length() < n) {
    throw std::invalid_argument("charge sequence shorter than n (" +
                                std::to_string(charges.length()) + " < " + std::to_string(n) + ")");
  }
}

double dot(const double* a, const double* b, std::size_t len) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < len; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

// Previous layer reversed (index j = hi - s) and cut into scaled blocks.
struct ScaledLayer {
  std::vector<double> log_rev;
  std::vector<double> scaled;
  std::vector<double> block_max;
  std::vector<char> block_wide;

  void load(const double* layer, std::size_t len) {
    log_rev.assign(len, kNegInf);
    for (std::size_t j = 0; j < len; ++j) log_rev[j] = layer[len - 1 - j];
    scaled.assign(len, 0.0);
    const std::size_t nb = (len + kBlock - 1) / kBlock;
    block_max.assign(nb, kNegInf);
    block_wide.assign(nb, 0);
    for (std::size_t b = 0; b < nb; ++b) {
      const std::size_t j0 = b * kBlock, j1 = std::min(len, j0 + kBlock);
      double mx = kNegInf, mn = kInf;
      for (std::size_t j = j0; j < j1; ++j) {
        if (log_rev[j] == kNegInf) continue;
        mx = std::max(mx, log_rev[j]);
        mn = std::min(mn, log_rev[j]);
      }
      block_max[b] = mx;
      if (mx == kNegInf) continue;
      block_wide[b] = (mx - mn) > kWideRange;
      for (std::size_t j = j0; j < j1; ++j) scaled[j] = std::exp(log_rev[j] - mx);
    }
  }
};

}  // namespace

std::vector<double> build_free(const PolymerParams& params, const ChargeSequence& charges,
                               const InterArrivalLaw& law) {
  const std::int64_t n = params.n;
  check_inputs(n, charges);
  const auto log_p = law.log_p_upto(n);
  const std::int64_t t_sup = static_cast<std::int64_t>(log_p.size()) - 1;
  std::vector<double> log_z(static_cast<std::size_t>(n + 1), kNegInf);
  log_z[0] = 0.0;
  std::vector<double> terms;
  for (std::int64_t m = 1; m <= n; ++m) {
    const std::int64_t t_hi = std::min(m, t_sup);
    terms.assign(static_cast<std::size_t>(t_hi), kNegInf);
    for (std::int64_t t = 1; t <= t_hi; ++t) {
      terms[static_cast<std::size_t>(t - 1)] =
          log_p[static_cast<std::size_t>(t)] + log_z[static_cast<std::size_t>(m - t)];
    }
    log_z[static_cast<std::size_t>(m)] = params.h + charges[m] + log_sum_exp(terms);
  }
  return log_z;
}

std::vector<double> build_suffix(const PolymerParams& params, const ChargeSequence& charges,
                                 const InterArrivalLaw& law) {
  const std::int64_t n = params.n;
  check_inputs(n, charges);
  const auto log_p = law.log_p_upto(n);
  const std::int64_t t_sup = static_cast<std::int64_t>(log_p.size()) - 1;
  std::vector<double> log_zs(static_cast<std::size_t>(n + 1), kNegInf);
  log_zs[static_cast<std::size_t>(n)] = 0.0;
  std::vector<double> terms;
  for (std::int64_t a = n - 1; a >= 0; --a) {
    const std::int64_t t_hi = std::min(n - a, t_sup);
    terms.assign(static_cast<std::size_t>(t_hi), kNegInf);
    for (std::int64_t t = 1; t <= t_hi; ++t) {
      terms[static_cast<std::size_t>(t - 1)] = log_p[static_cast<std::size_t>(t)] + params.h +
                                               charges[a + t] +
                                               log_zs[static_cast<std::size_t>(a + t)];
    }
    log_zs[static_cast<std::size_t>(a)] = log_sum_exp(terms);
  }
  return log_zs;
}

double ConstrainedTable::log_z(std::int64_t m, std::int64_t l) const {
  if (l < 0 || l > l_max_ || m < lo(l) || m > hi(l)) return kNegInf;
  return data_[offset_[static_cast<std::size_t>(l)] + static_cast<std::size_t>(m - lo(l))];
}

namespace {

struct Band {
  std::int64_t l_max;
  std::optional<std::int64_t> target;
  std::vector<std::int64_t> hi;
};

Band make_band(std::int64_t n, const ConstrainedOptions& options) {
  if (n < 1) throw std::invalid_argument("system size n must be >= 1");
  Band band;
  band.target = options.target_l;
  if (band.target) {
    if (*band.target < 1 || *band.target > n) {
      throw std::domain_error("infeasible contact count " + std::to_string(*band.target) +
                              " for n = " + std::to_string(n));
    }
    band.l_max = *band.target;
  } else {
    band.l_max = std::clamp<std::int64_t>(options.l_max.value_or(n), 1, n);
  }
  band.hi.resize(static_cast<std::size_t>(band.l_max + 1));
  band.hi[0] = 0;
  for (std::int64_t k = 1; k <= band.l_max; ++k) {
    band.hi[static_cast<std::size_t>(k)] = band.target ? n - (*band.target - k) : n;
  }
  return band;
}

}  // namespace

std::uint64_t constrained_entries(std::int64_t n, ConstrainedOptions options) {
  const Band band = make_band(n, options);
  std::uint64_t total = 1;
  for (std::int64_t k = 1; k <= band.l_max; ++k) {
    total += static_cast<std::uint64_t>(band.hi[static_cast<std::size_t>(k)] - k + 1);
  }
  return total;
}

ConstrainedTable build_constrained(std::int64_t n, const ChargeSequence& charges,
                                   const InterArrivalLaw& law, ConstrainedOptions options) {
  check_inputs(n, charges);
  Band band = make_band(n, options);
  const std::uint64_t entries = constrained_entries(n, options);
  if (entries > kMaxTableEntries) {
    throw std::length_error("constrained table of " + std::to_string(entries) +
                            " entries exceeds the memory guard");
  }

  ConstrainedTable table;
  table.n_ = n;
  table.l_max_ = band.l_max;
  table.target_ = band.target;
  table.hi_ = std::move(band.hi);
  table.offset_.resize(static_cast<std::size_t>(table.l_max_ + 1));
  table.data_.assign(static_cast<std::size_t>(entries), kNegInf);
  table.offset_[0] = 0;
  table.data_[0] = 0.0;  // Z_{0,0} = 1
  std::size_t off = 1;
  for (std::int64_t k = 1; k <= table.l_max_; ++k) {
    table.offset_[static_cast<std::size_t>(k)] = off;
    off += static_cast<std::size_t>(table.hi(k) - k + 1);
  }

  const auto log_p = law.log_p_upto(n);
  const std::int64_t t_sup = static_cast<std::int64_t>(log_p.size()) - 1;
  std::vector<double> lin_p(log_p.size(), 0.0);
  for (std::size_t t = 1; t < log_p.size(); ++t) lin_p[t] = std::exp(log_p[t]);

  ScaledLayer prev;
  for (std::int64_t k = 1; k <= table.l_max_; ++k) {
    const std::int64_t lo_prev = k - 1;
    const std::int64_t hi_prev = table.hi(k - 1);
    const auto len_prev = static_cast<std::size_t>(hi_prev - lo_prev + 1);
    prev.load(&table.data_[table.offset_[static_cast<std::size_t>(k - 1)]], len_prev);
    double* out = &table.data_[table.offset_[static_cast<std::size_t>(k)]];

    for (std::int64_t m = k; m <= table.hi(k); ++m) {
      const std::int64_t t_lo = std::max<std::int64_t>(1, m - hi_prev);
      const std::int64_t t_hi = std::min(t_sup, m - lo_prev);
      if (t_lo > t_hi) continue;
      // j = t + c indexes the reversed previous layer.
      const std::int64_t c = hi_prev - m;
      const auto j_a = static_cast<std::size_t>(t_lo + c);
      const auto j_b = static_cast<std::size_t>(t_hi + c);
      LogSumAccumulator acc;
      for (std::size_t b = j_a / kBlock; b <= j_b / kBlock; ++b) {
        if (prev.block_max[b] == kNegInf) continue;
        const std::size_t s0 = std::max(j_a, b * kBlock);
        const std::size_t s1 = std::min(j_b, b * kBlock + kBlock - 1);
        const double* p_ptr = &lin_p[static_cast<std::size_t>(static_cast<std::int64_t>(s0) - c)];
        double d = prev.block_wide[b] ? 0.0 : dot(p_ptr, &prev.scaled[s0], s1 - s0 + 1);
        if (d > kTinyDot) {
          acc.add(prev.block_max[b] + std::log(d));
        } else {
          for (std::size_t j = s0; j <= s1; ++j) {
            acc.add(log_p[static_cast<std::size_t>(static_cast<std::int64_t>(j) - c)] +
                    prev.log_rev[j]);
          }
        }
      }
      const double v = acc.value();
      out[m - k] = v == kNegInf ? kNegInf : charges[m] + v;
    }
  }
  return table;
}

std::vector<double> ln_log_distribution(const ConstrainedTable& table, double h) {
  if (!table.complete()) {
    throw std::invalid_argument("the L_n law needs a complete constrained table");
  }
  const std::int64_t n = table.n();
  std::vector<double> w(static_cast<std::size_t>(n + 1), kNegInf);
  for (std::int64_t l = 1; l <= n; ++l) {
    w[static_cast<std::size_t>(l)] = h * static_cast<double>(l) + table.log_z(n, l);
  }
  const double total = log_sum_exp(w);
  for (double& x : w) x -= total;
  return w;
}

std::vector<double> ln_distribution(const ConstrainedTable& table, double h) {
  auto w = ln_log_distribution(table, h);
  for (double& x : w) x = std::exp(x);
  return w;
}

Moments ln_moments(std::span<const double> distribution) {
  CompensatedSum mean;
  for (std::size_t l = 0; l < distribution.size(); ++l) {
    mean.add(static_cast<double>(l) * distribution[l]);
  }
  const double mu = mean.value();
  CompensatedSum var;
  for (std::size_t l = 0; l < distribution.size(); ++l) {
    const double d = static_cast<double>(l) - mu;
    var.add(d * d * distribution[l]);
  }
  return {mu, var.value()};
}

Moments free_moments(const PolymerParams& params, const ChargeSequence& charges,
                     const InterArrivalLaw& law) {
  const std::int64_t n = params.n;
  const auto log_z = build_free(params, charges, law);
  const auto log_p = law.log_p_upto(n);
  const std::int64_t t_sup = static_cast<std::int64_t>(log_p.size()) - 1;
  std::vector<double> mean(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> var(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> w;
  for (std::int64_t m = 1; m <= n; ++m) {
    const std::int64_t t_hi = std::min(m, t_sup);
    const double base = params.h + charges[m] - log_z[static_cast<std::size_t>(m)];
    w.assign(static_cast<std::size_t>(t_hi + 1), 0.0);
    CompensatedSum a;
    for (std::int64_t t = 1; t <= t_hi; ++t) {
      const auto s = static_cast<std::size_t>(m - t);
      w[static_cast<std::size_t>(t)] = std::exp(log_p[static_cast<std::size_t>(t)] + log_z[s] + base);
      a.add(w[static_cast<std::size_t>(t)] * (1.0 + mean[s]));
    }
    mean[static_cast<std::size_t>(m)] = a.value();
    CompensatedSum v;
    for (std::int64_t t = 1; t <= t_hi; ++t) {
      const auto s = static_cast<std::size_t>(m - t);
      const double d = 1.0 + mean[s] - a.value();
      v.add(w[static_cast<std::size_t>(t)] * (var[s] + d * d));
    }
    var[static_cast<std::size_t>(m)] = v.value();
  }
  return {mean[static_cast<std::size_t>(n)], var[static_cast<std::size_t>(n)]};
}

std::vector<double> contact_marginals(const PolymerParams& params, const ChargeSequence& charges,
                                      const InterArrivalLaw& law) {
  const auto fwd = build_free(params, charges, law);
  const auto bwd = build_suffix(params, charges, law);
  const double total = fwd.back();
  std::vector<double> out(fwd.size());
  for (std::size_t a = 0; a < fwd.size(); ++a) {
    out[a] = std::min(1.0, std::exp(fwd[a] + bwd[a] - total));
  }
  out.front() = 1.0;
  out.back() = 1.0;
  return out;
}

double contact_marginal(const PolymerParams& params, const ChargeSequence& charges,
                        const InterArrivalLaw& law, std::int64_t a) {
  if (a < 0 || a > params.n) throw std::out_of_range("site index outside 0..n");
  return contact_marginals(params, charges, law)[static_cast<std::size_t>(a)];
}

DpTables build_tables(const PolymerParams& params, const ChargeSequence& charges,
                      const InterArrivalLaw& law) {
  DpTables t{params, build_free(params, charges, law), build_constrained(params.n, charges, law),
             {}, {}};
  t.ln_law = ln_distribution(t.constrained, params.h);
  t.moments = ln_moments(t.ln_law);
  return t;
}

double log_path_weight(const RenewalPath& path, double h, const ChargeSequence& charges,
                       const InterArrivalLaw& law) {
  double w = 0.0;
  for (std::size_t i = 1; i < path.sites.size(); ++i) {
    const std::int64_t s = path.sites[i];
    w += law.log_p(s - path.sites[i - 1]) + h + charges[s];
  }
  return w;
}

}  // namespace pinning
