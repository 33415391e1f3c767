#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pinning {

/// Shape of the slowly varying factor in p(t) = ell(t) / t^(alpha+1).
///   constant:  ell(t) = c
///   log_power: ell(t) = c * (1 + log t)^beta
///   table:     explicit positive weights for t = 1..k (normalized on build)
enum class EllKind { constant, log_power, table };

std::string to_string(EllKind kind);
EllKind ell_kind_from_string(const std::string& name);

struct LawSpec {
  double alpha = 2.0;
  EllKind ell_kind = EllKind::constant;
  std::vector<double> ell_params{1.0};
  // Support cap; nullopt means unbounded, realized through a numeric cutoff.
  std::optional<std::int64_t> t_max;

  bool operator==(const LawSpec&) const = default;
};

/// Laplace-type moments E[T^k e^{-phi T}] for k = 0, 1, 2.
/// An empty m1 / m2 signals a divergent series (only possible at phi = 0).
struct LaplaceMoments {
  double m0 = 0.0;
  std::optional<double> m1;
  std::optional<double> m2;
};

/// Inter-arrival distribution of the renewal process. Immutable once built.
class InterArrivalLaw {
 public:
  /// Validates the parameters and normalizes. Throws std::invalid_argument on
  /// alpha < 1, nonpositive ell parameters, or t_max < 2.
  static InterArrivalLaw build(const LawSpec& spec);

  const LawSpec& spec() const { return spec_; }
  double alpha() const { return spec_.alpha; }
  bool bounded() const { return spec_.t_max.has_value() || spec_.ell_kind == EllKind::table; }

  /// Largest tabulated gap: t_max for bounded laws, T_cut otherwise.
  std::int64_t support() const { return support_; }

  /// log p(t); -inf outside 1..support().
  double log_p(std::int64_t t) const;
  double p(std::int64_t t) const;

  /// log of the continuous extension ell(z)/z^(alpha+1) normalized like p; z >= 1.
  double log_p_extended(double z) const;

  /// log p(t) for t = 0..min(t_hi, support()); entry 0 is -inf.
  std::vector<double> log_p_upto(std::int64_t t_hi) const;

  /// log of sum_t ell(t)/t^(alpha+1) over the full (possibly infinite) support.
  double log_normalization() const { return log_norm_; }

  /// Probability mass beyond support(); zero for bounded laws, < 1e-14 otherwise.
  double tail_mass() const { return tail_mass_; }

  /// sum_{t >= 1} t^k w(t) e^{-phi t} / Z over the full support, with w the raw
  /// weight. Returns +inf when the series diverges.
  double series(int k, double phi) const;

  /// log of series(k, phi), accurate when e^{-phi} underflows.
  double log_series(int k, double phi) const;

 private:
  InterArrivalLaw() = default;
  double log_weight(double t) const;
  // sum t^k w(t) e^{-phi (t - 1) - log_scale}
  double raw_series(int k, double phi, double log_scale) const;
  bool diverges(int k, double phi) const;

  LawSpec spec_;
  std::int64_t support_ = 0;
  double log_norm_ = 0.0;
  double tail_mass_ = 0.0;
  std::vector<double> table_;  // log p(t), index t - 1
  std::vector<double> table_weights_;
};

/// E[T]; +inf when the mean is infinite.
double mean_T(const InterArrivalLaw& law);

/// (E[e^{-phi T}], E[T e^{-phi T}], E[T^2 e^{-phi T}]). Requires phi >= 0.
LaplaceMoments laplace_moments(const InterArrivalLaw& law, double phi);

}  // namespace pinning
