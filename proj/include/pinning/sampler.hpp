#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pinning/dp_engine.hpp"
#include "pinning/path.hpp"
#include "pinning/rng.hpp"

namespace pinning {

/// Raised when a requested conditioning event has probability zero.
class InfeasibleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Side { at_least, at_most };

/// Exact draw from P_{n,h,omega} by backward decomposition over the free table.
RenewalPath sample_free(std::span<const double> log_z_free, const PolymerParams& params,
                        const ChargeSequence& charges, const InterArrivalLaw& law, JobRng& rng);

/// Exact draw from P[. | L_n = l]; h never enters.
RenewalPath sample_conditioned(const ConstrainedTable& table, std::int64_t n, std::int64_t l,
                               const ChargeSequence& charges, const InterArrivalLaw& law,
                               JobRng& rng);

/// Draw conditioned on L_n >= r n (or <= r n): l from the restricted law of L_n
/// at h, then a conditioned path. Needs a complete table.
RenewalPath sample_soft(const ConstrainedTable& table, std::int64_t n, double r, Side side,
                        double h, const ChargeSequence& charges, const InterArrivalLaw& law,
                        JobRng& rng);

using DensityPotential = std::function<double(double)>;

/// Draw from the nonlocal model with weight e^{n U(L_n/n)}: l with log-weight
/// n U(l/n) + log Z_{n,l}, then a conditioned path. Needs a complete table.
RenewalPath sample_umodel(const ConstrainedTable& table, std::int64_t n, const DensityPotential& u,
                          const ChargeSequence& charges, const InterArrivalLaw& law, JobRng& rng);

/// Log-probabilities of the contact count under the soft conditioning (l = 0..n).
std::vector<double> soft_count_law(const ConstrainedTable& table, double r, Side side, double h);

/// Log-probabilities of the contact count under the U-model (l = 0..n).
std::vector<double> umodel_count_law(const ConstrainedTable& table, const DensityPotential& u);

/// Exact log-probability of a path under P[. | L_n = l] from the table.
double conditioned_log_prob(const RenewalPath& path, const ConstrainedTable& table,
                            const ChargeSequence& charges, const InterArrivalLaw& law);

}  // namespace pinning
