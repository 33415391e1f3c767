#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracle/brute_force.hpp"
#include "pinning/disorder.hpp"
#include "pinning/renewal_law.hpp"

namespace testing_support {

using namespace pinning;

// p(1) = 0.8, p(2) = 0.2
inline InterArrivalLaw two_point() { return InterArrivalLaw::build({1.0, EllKind::constant, {1.0}, 2}); }
inline InterArrivalLaw alpha2() {
  return InterArrivalLaw::build({2.0, EllKind::constant, {1.0}, std::nullopt});
}
inline InterArrivalLaw alpha1_log() {
  return InterArrivalLaw::build({1.0, EllKind::log_power, {1.0, 1.0}, std::nullopt});
}
// p(1) = 1
inline InterArrivalLaw degenerate() { return InterArrivalLaw::build({1.0, EllKind::table, {1.0}, std::nullopt}); }

inline std::vector<InterArrivalLaw> battery_laws() { return {two_point(), alpha2(), alpha1_log()}; }

inline std::vector<DisorderSpec> battery_disorders() {
  return {{DisorderKind::zero, 0.0, 0},
          {DisorderKind::gaussian, 1.0, 17},
          {DisorderKind::rademacher, 1.0, 23}};
}

inline oracle::BruteForce brute(const InterArrivalLaw& law, const ChargeSequence& charges,
                                std::int64_t n, double h) {
  std::vector<long double> omega(static_cast<std::size_t>(n) + 1, 0.0L);
  for (std::int64_t a = 1; a <= n; ++a) omega[static_cast<std::size_t>(a)] = charges[a];
  return oracle::enumerate(
      n, h, [&](std::int64_t t) { return static_cast<long double>(law.p(t)); }, omega);
}

// |a - b| <= tol * max(1, |b|), with equal infinities accepted.
inline bool log_close(double a, double b, double tol = 1e-10) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

}  // namespace testing_support
