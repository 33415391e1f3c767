#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pinning/disorder.hpp"
#include "pinning/renewal_law.hpp"
#include "pinning/sampler.hpp"

namespace pinning {

enum class ExperimentKind {
  E1_pure_bigjump,
  E2_pure_loggap,
  E3_disorder_nogap,
  E4_lclt,
  E5_rate_convexity,
  E6_mesoscopic,
  E7_umodel,
  E8_soft,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

/// Nonlocal potential for the U-model.
///   linear:    U(r) = a r                      params {a}
///   quadratic: U(r) = a r - b (r - r0)^2       params {a, b, r0}
enum class PotentialKind { linear, quadratic };

struct PotentialSpec {
  PotentialKind kind = PotentialKind::linear;
  std::vector<double> params{1.0};
  bool operator==(const PotentialSpec&) const = default;
  DensityPotential function() const;
};

/// Bad configuration; field() names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::E1_pure_bigjump;
  LawSpec law;
  DisorderSpec disorder;
  std::vector<std::int64_t> n_ladder;
  double h = 0.0;
  std::optional<double> r;          // target contact density
  std::optional<std::int64_t> l;    // explicit contact count, overrides r
  std::uint64_t samples = 1000;
  std::uint64_t replicas = 1;
  std::uint64_t master_seed = 1;
  std::string output;
  double c = 2.0;                   // M_n > c log n threshold
  double epsilon = 0.1;             // band half-width around the gap prediction
  Side side = Side::at_least;       // E8
  std::optional<std::int64_t> window;  // E6; default ceil((log n)^1.5)
  std::vector<double> r_grid;       // E5
  PotentialSpec potential;          // E7

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses the INI text form. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical INI text; parse_config(serialize(c)) == c.
std::string serialize(const ExperimentConfig& config);

/// Hex SHA-256 of the canonical text.
std::string config_hash(const ExperimentConfig& config);
/// First 64 bits of the hash, for in-memory keys.
std::uint64_t config_key(const ExperimentConfig& config);

/// Parses a law given either inline ("alpha=2,ell=constant,params=1,t_max=none")
/// or as a path to an INI file with a [law] section.
LawSpec parse_law(const std::string& text_or_path);

/// "a:b:k" (k evenly spaced points, ends included) or "x1,x2,...".
std::vector<double> parse_grid(const std::string& text);

}  // namespace pinning
