#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pinning/config.hpp"

namespace pinning {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kModuleVersions =
    "renewal_law/1,disorder/1,dp_engine/1,sampler/1,pure_solver/1,observables/1,"
    "cli_experiments/1";

/// A hard invariant failed during a run (exit status 1).
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Finding {
  enum class Level { error, infeasible, warning };
  Level level = Level::warning;
  std::string field;
  std::string message;
};

std::string to_string(Finding::Level level);

struct ValidationReport {
  std::vector<Finding> findings;
  std::uint64_t peak_table_entries = 0;
  double peak_table_bytes = 0.0;
  double estimated_seconds = 0.0;

  bool has_errors() const;
};

/// Dry run: feasibility, table memory and a rough runtime bound. Computes nothing.
ValidationReport validate(const ExperimentConfig& config);

/// Rows of a report with named columns; every cell is already formatted.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
  const std::string& cell(std::size_t row, const std::string& name) const;
  /// Indices of rows whose column `name` equals `value`.
  std::vector<std::size_t> where(const std::string& name, const std::string& value) const;
};

struct RunResult {
  Table table;
  std::string header;  // '#' lines
  std::string body;    // column line and rows
  std::string path;    // empty when nothing was written
};

struct RunOptions {
  unsigned workers = 1;
  bool write = true;
};

/// Worker count from PINNING_WORKERS, else the hardware concurrency.
unsigned workers_from_env();

/// Runs the experiment and writes the CSV artifact. Throws ConfigError for
/// invalid configs or a clashing artifact, InvariantViolation on a failed check.
RunResult run(const ExperimentConfig& config, const RunOptions& options = {});

/// Contact count targeted at size n, before feasibility checks.
std::int64_t target_contacts(const ExperimentConfig& config, std::int64_t n);

/// Whether P[L_n = l] > 0 under the law's support.
bool feasible_contacts(const InterArrivalLaw& law, std::int64_t n, std::int64_t l);

}  // namespace pinning
