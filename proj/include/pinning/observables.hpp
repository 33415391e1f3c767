#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pinning/disorder.hpp"
#include "pinning/dp_engine.hpp"
#include "pinning/path.hpp"
#include "pinning/renewal_law.hpp"

namespace pinning {

struct QuenchedEstimate {
  std::int64_t n = 0;
  double h = 0.0;
  double f_hat = 0.0;    // (1/n) log Z_{n,h}(omega)
  double rho_hat = 0.0;  // E[L_n] / n
  double v_hat = 0.0;    // Var[L_n] / n
  // sqrt(n log(2/delta)) / n. A scale, not a calibrated interval.
  double error_bar = 0.0;
};

QuenchedEstimate estimate_quenched(const PolymerParams& params, const ChargeSequence& charges,
                                   const InterArrivalLaw& law, double delta = 0.05);

/// Same estimate from already built tables.
QuenchedEstimate estimate_quenched(const DpTables& tables, double delta = 0.05);

struct ReplicaSummary {
  std::size_t count = 0;
  double f_mean = 0.0, f_stddev = 0.0, f_se = 0.0;
  double rho_mean = 0.0, rho_stddev = 0.0, rho_se = 0.0;
  double v_mean = 0.0, v_stddev = 0.0, v_se = 0.0;
};

/// Mean, sample standard deviation and standard error across replicas.
ReplicaSummary aggregate(std::span<const QuenchedEstimate> replicas);

/// Maximal gap statistics of one sampler configuration.
struct GapReport {
  std::int64_t n = 0;
  std::int64_t l = -1;  // -1 for unconditioned streams
  std::uint64_t samples = 0;
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<std::uint64_t> histogram;  // histogram[m] = #paths with M_n = m

  /// Smallest m with P[M_n <= m] >= q.
  std::int64_t quantile(double q) const;
  /// Fraction of paths with M_n > c log n.
  double exceed_fraction(double c) const;
  /// Fraction of paths with |M_n / scale - target| > eps.
  double outside_fraction(double scale, double target, double eps) const;
};

/// Single-writer accumulator keyed by a configuration hash.
class GapAggregator {
 public:
  GapAggregator(std::int64_t n, std::uint64_t config_hash, std::int64_t l = -1);

  /// Throws std::invalid_argument on a foreign hash or a path of the wrong length.
  void add(const RenewalPath& path, std::uint64_t config_hash);
  void merge(const GapAggregator& other);

  std::uint64_t config_hash() const { return hash_; }
  GapReport report() const;

 private:
  std::int64_t n_;
  std::int64_t l_;
  std::uint64_t hash_;
  std::uint64_t count_ = 0;
  std::vector<std::uint64_t> hist_;
};

GapReport gap_statistics(std::span<const RenewalPath> paths, std::uint64_t config_hash,
                         std::int64_t l = -1);

/// max over windows (i, j], j - i >= w, of |(1/(j-i)) sum X_a - l/n|.
/// Throws std::invalid_argument for w < 1 or w > n.
double window_density_max(const RenewalPath& path, std::int64_t w);

/// Default window ceil((log n)^1.5), clamped to [1, n].
std::int64_t default_window(std::int64_t n);

/// sup_l |sqrt(2 pi v n) P[L_n = l] - exp(-(l - mean)^2 / (2 v n))|.
/// Throws std::invalid_argument for v_hat <= 0.
double lclt_residual(std::span<const double> distribution, double mean, double v_hat);

struct RatePoint {
  std::int64_t n = 0;
  double r = 0.0;
  std::int64_t l = 0;
  double value = 0.0;  // -(1/n) log P[L_n = l]
  bool feasible = false;
};

/// I_n(r) = -(1/n) log P[L_n = floor(r n)] from a log law of L_n (index l = 0..n).
RatePoint empirical_rate(std::span<const double> log_law, double r);

/// One rate point per table in the ladder.
std::vector<RatePoint> empirical_rate(std::span<const ConstrainedTable> ladder, double h,
                                      double r);

/// Second differences (v[i-1] - 2 v[i] + v[i+1]) / dr^2 over an evenly spaced grid.
std::vector<double> second_differences(std::span<const double> values, double dr);

}  // namespace pinning
