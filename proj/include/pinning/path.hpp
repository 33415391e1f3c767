#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace pinning {

/// One renewal configuration pinned at both ends: 0 = S_0 < S_1 < ... < S_L = n.
struct RenewalPath {
  std::vector<std::int64_t> sites;  // includes S_0 = 0
  double log_prob = 0.0;            // product of the sampler's transition probabilities

  std::int64_t n() const { return sites.back(); }
  std::int64_t contact_count() const { return static_cast<std::int64_t>(sites.size()) - 1; }
  std::int64_t max_gap() const;
  std::vector<std::int64_t> gaps() const;

  /// Checks S_0 = 0, strict increase, at least one gap.
  bool well_formed() const;

  bool operator==(const RenewalPath& o) const { return sites == o.sites; }
};

/// Builds a path from its gap sequence.
RenewalPath path_from_gaps(const std::vector<std::int64_t>& gaps);

/// CSV rows replica,sample_id,L_n,M_n and optionally the sites joined by ';'.
/// The header is written only when `header` is set, so replicas can be appended.
void write_paths_csv(std::ostream& os, std::int64_t replica, std::span<const RenewalPath> paths,
                     bool with_sites = false, bool header = true);

}  // namespace pinning
