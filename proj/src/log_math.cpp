#include "pinning/log_math.hpp"

#include <algorithm>

namespace pinning {

double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return kNegInf;
  const double m = *std::max_element(xs.begin(), xs.end());
  if (m == kNegInf) return kNegInf;
  if (m == kInf) return kInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

std::vector<double> log_softmax(std::span<const double> log_weights) {
  const double total = log_sum_exp(log_weights);
  std::vector<double> out(log_weights.size(), 0.0);
  if (total == kNegInf) return out;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    out[i] = std::exp(log_weights[i] - total);
  }
  return out;
}

}  // namespace pinning
