// pinning: command-line harness for the pinning-model engine.
//
//   pinning run <config>
//   pinning validate <config>
//   pinning pure-curves <law> <grid> [--rate-h H] [--r-grid GRID] [--out PREFIX]
//   pinning dp-dump <config>
//
// Worker count: PINNING_WORKERS. Exit codes: 0 ok, 1 invariant violation,
// 2 config error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "pinning/config.hpp"
#include "pinning/disorder.hpp"
#include "pinning/dp_engine.hpp"
#include "pinning/experiments.hpp"
#include "pinning/pure_solver.hpp"
#include "pinning/util.hpp"

namespace {

using namespace pinning;

constexpr int kOk = 0;
constexpr int kInvariant = 1;
constexpr int kConfig = 2;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("output", "cannot write '" + path + "'");
  return out;
}

int cmd_run(const std::string& path) {
  const auto config = load_config(path);
  const auto res = run(config, {.workers = workers_from_env()});
  std::cout << "wrote " << res.path << " (" << res.table.rows.size() << " rows)\n";
  return kOk;
}

int cmd_validate(const std::string& path) {
  const auto config = load_config(path);
  const auto rep = validate(config);
  for (const auto& f : rep.findings)
    std::cout << to_string(f.level) << ' ' << f.field << ": " << f.message << '\n';
  std::cout << "findings " << rep.findings.size() << '\n';
  std::cout << "peak_table_entries " << rep.peak_table_entries << '\n';
  std::cout << "peak_table_bytes " << format_double(rep.peak_table_bytes) << '\n';
  std::cout << "estimated_seconds " << format_double(rep.estimated_seconds) << '\n';
  return rep.has_errors() ? kConfig : kOk;
}

int cmd_pure_curves(const std::string& law_text, const std::string& grid_text, double h,
                    const std::string& r_grid_text, const std::string& prefix) {
  const auto spec = parse_law(law_text);
  std::vector<double> hs, rs;
  try {
    hs = parse_grid(grid_text);
    rs = parse_grid(r_grid_text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("grid", e.what());
  }
  const PureCurves curves(InterArrivalLaw::build(spec));
  {
    auto out = open_out(prefix + "_f.csv");
    out << "# rho_c=" << format_double(curves.rho_c()) << '\n';
    out << "h,f,rho\n";
    for (double x : hs) {
      const double rho = x > 0.0 ? curves.rho(x) : 0.0;
      out << format_double(x) << ',' << format_double(curves.f(x)) << ','
          << format_double(rho) << '\n';
    }
  }
  {
    auto out = open_out(prefix + "_rate.csv");
    out << "# h=" << format_double(h) << '\n';
    out << "r,I\n";
    for (double r : rs) out << format_double(r) << ',' << format_double(curves.rate(h, r)) << '\n';
  }
  std::cout << "wrote " << prefix << "_f.csv and " << prefix << "_rate.csv\n";
  return kOk;
}

int cmd_dp_dump(const std::string& path) {
  const auto config = load_config(path);
  const auto law = InterArrivalLaw::build(config.law);
  std::string prefix = config.output.empty() ? "dp_dump" : config.output;
  if (prefix.ends_with(".csv")) prefix.resize(prefix.size() - 4);
  for (auto n : config.n_ladder) {
    if (constrained_entries(n) > kMaxTableEntries)
      throw ConfigError("experiment.n_ladder",
                        "n = " + std::to_string(n) + " exceeds the constrained table guard");
    const auto charges = config.disorder.kind == DisorderKind::zero
                             ? zero_charges(n)
                             : generate(replica_spec(config.disorder, 0), n);
    const PolymerParams params{n, config.h};
    const auto tables = build_tables(params, charges, law);
    const auto marginals = contact_marginals(params, charges, law);
    const std::string base = prefix + "_n" + std::to_string(n);
    {
      auto out = open_out(base + "_free.csv");
      out << "m,log_z\n";
      for (std::size_t m = 0; m < tables.log_z_free.size(); ++m)
        out << m << ',' << format_double(tables.log_z_free[m]) << '\n';
    }
    {
      auto out = open_out(base + "_law.csv");
      out << "l,p\n";
      for (std::size_t l = 0; l < tables.ln_law.size(); ++l)
        out << l << ',' << format_double(tables.ln_law[l]) << '\n';
    }
    {
      auto out = open_out(base + "_marginals.csv");
      out << "a,p\n";
      for (std::size_t a = 0; a < marginals.size(); ++a)
        out << a << ',' << format_double(marginals[a]) << '\n';
    }
    {
      auto out = open_out(base + "_charges.csv");
      write_csv(out, charges);
    }
    std::cout << "wrote " << base << "_{free,law,marginals,charges}.csv\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pinning-model engine on renewal processes"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "run an experiment config and write its CSV");
  run_cmd->add_option("config", config_path, "experiment config (INI)")->required();

  auto* validate_cmd = app.add_subcommand("validate", "dry-run feasibility and cost estimate");
  validate_cmd->add_option("config", config_path, "experiment config (INI)")->required();

  std::string law_text, grid_text, r_grid_text = "0:1:101", prefix = "pure_curves";
  double h = 1.0;
  auto* curves_cmd = app.add_subcommand("pure-curves", "dump f, rho and the rate function");
  curves_cmd->add_option("law", law_text, "alpha=..,ell=..,params=..,t_max=.. or an INI file")
      ->required();
  curves_cmd->add_option("grid", grid_text, "h grid, a:b:k or a comma list")->required();
  curves_cmd->add_option("--rate-h", h, "h for the rate function");
  curves_cmd->add_option("--r-grid", r_grid_text, "r grid for the rate function");
  curves_cmd->add_option("--out", prefix, "output prefix");

  auto* dump_cmd = app.add_subcommand("dp-dump", "dump DP tables for each ladder size");
  dump_cmd->add_option("config", config_path, "experiment config (INI)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run_cmd) return cmd_run(config_path);
    if (*validate_cmd) return cmd_validate(config_path);
    if (*curves_cmd) return cmd_pure_curves(law_text, grid_text, h, r_grid_text, prefix);
    if (*dump_cmd) return cmd_dp_dump(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvariant;
  }
  return kOk;
}
