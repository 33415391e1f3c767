#include "pinning/path.hpp"

#include <algorithm>
#include <ostream>

namespace pinning {

std::int64_t RenewalPath::max_gap() const {
  std::int64_t m = 0;
  for (std::size_t i = 1; i < sites.size(); ++i) m = std::max(m, sites[i] - sites[i - 1]);
  return m;
}

std::vector<std::int64_t> RenewalPath::gaps() const {
  std::vector<std::int64_t> g;
  g.reserve(sites.size());
  for (std::size_t i = 1; i < sites.size(); ++i) g.push_back(sites[i] - sites[i - 1]);
  return g;
}

bool RenewalPath::well_formed() const {
  if (sites.size() < 2 || sites.front() != 0) return false;
  for (std::size_t i = 1; i < sites.size(); ++i) {
    if (sites[i] <= sites[i - 1]) return false;
  }
  return true;
}

RenewalPath path_from_gaps(const std::vector<std::int64_t>& gaps) {
  RenewalPath p;
  p.sites.push_back(0);
  for (auto g : gaps) p.sites.push_back(p.sites.back() + g);
  return p;
}

void write_paths_csv(std::ostream& os, std::int64_t replica, std::span<const RenewalPath> paths,
                     bool with_sites, bool header) {
  if (header) os << "replica,sample_id,L_n,M_n" << (with_sites ? ",sites" : "") << '\n';
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto& p = paths[i];
    os << replica << ',' << i << ',' << p.contact_count() << ',' << p.max_gap();
    if (with_sites) {
      os << ',';
      for (std::size_t k = 0; k < p.sites.size(); ++k) os << (k ? ";" : "") << p.sites[k];
    }
    os << '\n';
  }
}

}  // namespace pinning
