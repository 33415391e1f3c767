#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pinning/disorder.hpp"
#include "pinning/path.hpp"
#include "pinning/renewal_law.hpp"

namespace pinning {

struct PolymerParams {
  std::int64_t n = 1;
  double h = 0.0;
};

/// log Z_{m,h}(omega) for m = 0..n, with log_z[0] = 0.
std::vector<double> build_free(const PolymerParams& params, const ChargeSequence& charges,
                               const InterArrivalLaw& law);

/// log Z_{n-a,h}(theta^a omega) for a = 0..n (suffix partition functions).
std::vector<double> build_suffix(const PolymerParams& params, const ChargeSequence& charges,
                                 const InterArrivalLaw& law);

struct ConstrainedOptions {
  // Highest contact count kept; defaults to n.
  std::optional<std::int64_t> l_max;
  // When set, only entries that can still reach (n, target_l) are computed.
  std::optional<std::int64_t> target_l;
};

/// Contact-count resolved partition functions Z_{m,l} at h = 0.
/// Stored layer by layer in l; layer l holds m in [lo(l), hi(l)].
class ConstrainedTable {
 public:
  std::int64_t n() const { return n_; }
  std::int64_t l_max() const { return l_max_; }
  std::optional<std::int64_t> target() const { return target_; }
  bool complete() const { return l_max_ == n_ && !target_; }

  std::int64_t lo(std::int64_t l) const { return l; }
  std::int64_t hi(std::int64_t l) const { return hi_[static_cast<std::size_t>(l)]; }

  /// log Z_{m,l}; -inf outside the stored band or when infeasible.
  double log_z(std::int64_t m, std::int64_t l) const;

  std::size_t entries() const { return data_.size(); }

 private:
  friend ConstrainedTable build_constrained(std::int64_t, const ChargeSequence&,
                                            const InterArrivalLaw&, ConstrainedOptions);
  std::int64_t n_ = 0;
  std::int64_t l_max_ = 0;
  std::optional<std::int64_t> target_;
  std::vector<std::int64_t> hi_;
  std::vector<std::size_t> offset_;
  std::vector<double> data_;
};

/// Entries a table for (n, options) would hold; used by memory guards.
std::uint64_t constrained_entries(std::int64_t n, ConstrainedOptions options = {});

/// Tables above this many entries are refused (about 2 GiB of doubles).
inline constexpr std::uint64_t kMaxTableEntries = 256ULL << 20;

ConstrainedTable build_constrained(std::int64_t n, const ChargeSequence& charges,
                                   const InterArrivalLaw& law, ConstrainedOptions options = {});

/// log P_{n,h,omega}[L_n = l] for l = 0..n. Needs a complete table.
std::vector<double> ln_log_distribution(const ConstrainedTable& table, double h);

/// P_{n,h,omega}[L_n = l] for l = 0..n.
std::vector<double> ln_distribution(const ConstrainedTable& table, double h);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and variance of a distribution indexed by l.
Moments ln_moments(std::span<const double> distribution);

/// E[L_n] and Var[L_n] from the renewal recursion L_m = 1 + L_{m-t}; O(n^2),
/// no constrained table needed.
Moments free_moments(const PolymerParams& params, const ChargeSequence& charges,
                     const InterArrivalLaw& law);

/// E_{n,h,omega}[X_a] for a = 0..n.
std::vector<double> contact_marginals(const PolymerParams& params, const ChargeSequence& charges,
                                      const InterArrivalLaw& law);

double contact_marginal(const PolymerParams& params, const ChargeSequence& charges,
                        const InterArrivalLaw& law, std::int64_t a);

/// Bundle of everything the engine derives for one (omega, h, n).
struct DpTables {
  PolymerParams params;
  std::vector<double> log_z_free;
  ConstrainedTable constrained;
  std::vector<double> ln_law;
  Moments moments;
};

DpTables build_tables(const PolymerParams& params, const ChargeSequence& charges,
                      const InterArrivalLaw& law);

/// log of e^{sum (h + omega_{S_i})} prod p(T_i) for a concrete path.
double log_path_weight(const RenewalPath& path, double h, const ChargeSequence& charges,
                       const InterArrivalLaw& law);

}  // namespace pinning
