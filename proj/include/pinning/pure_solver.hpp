#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pinning/renewal_law.hpp"

namespace pinning {

/// Free energy of the pure model: 0 for h <= 0, otherwise the unique positive
/// root f of E[e^{-f T}] = e^{-h}.
double solve_f(const InterArrivalLaw& law, double h);

enum class GapRegime { big_jump, log_gap, boundary };

std::string to_string(GapRegime regime);

struct GapPrediction {
  GapRegime regime = GapRegime::boundary;
  // big_jump: limit of M_n / n; log_gap: limit of M_n / log n; boundary: NaN.
  double limit = 0.0;
};

/// Closed-form curves of the pure (omega == 0) model for one law.
class PureCurves {
 public:
  explicit PureCurves(InterArrivalLaw law);

  const InterArrivalLaw& law() const { return law_; }

  double h_c() const { return 0.0; }
  /// 1/E[T], or 0 when the mean is infinite.
  double rho_c() const { return rho_c_; }

  double f(double h) const { return solve_f(law_, h); }

  /// Contact density E[e^{-fT}] / E[T e^{-fT}] at f = f(h); requires h > 0.
  double rho(double h) const;

  /// Inverse of rho on (rho_c, 1), by bracketed root finding.
  double iota_rho(double r) const;

  /// Rate function of the contact density; +inf outside [0, 1].
  double rate(double h, double r) const;

  /// Conditioned maximal-gap limit at contact density r in (0, 1).
  GapPrediction predict_gaps(double r) const;

 private:
  InterArrivalLaw law_;
  double rho_c_ = 0.0;
};

/// log P[S_l = m] for m = 0..n_max, by repeated log-domain convolution.
std::vector<double> log_convolve_S(const InterArrivalLaw& law, std::int64_t l, std::int64_t n_max);

/// P[S_l = m] for m = 0..n_max.
std::vector<double> convolve_S(const InterArrivalLaw& law, std::int64_t l, std::int64_t n_max);

/// Work bound (l * n_max) above which convolve_S refuses to run.
inline constexpr std::int64_t kConvolutionGuard = 50'000'000;

}  // namespace pinning
