#include "pinning/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <thread>

#include "pinning/dp_engine.hpp"
#include "pinning/log_math.hpp"
#include "pinning/observables.hpp"
#include "pinning/pure_solver.hpp"
#include "pinning/rng.hpp"
#include "pinning/sampler.hpp"
#include "pinning/util.hpp"

namespace pinning {

namespace {

using K = ExperimentKind;

bool needs_full_table(K kind) {
  return kind == K::E4_lclt || kind == K::E5_rate_convexity || kind == K::E7_umodel ||
         kind == K::E8_soft;
}

bool is_pure(K kind) { return kind == K::E1_pure_bigjump || kind == K::E2_pure_loggap; }

bool has_disorder(const ExperimentConfig& c) {
  return !is_pure(c.experiment) && c.disorder.kind != DisorderKind::zero;
}

std::string num(double x) { return format_double(x); }
std::string num(std::int64_t x) { return std::to_string(x); }
std::string num(std::uint64_t x) { return std::to_string(x); }
const std::string kNan = "nan";

std::uint64_t job_key(K kind, std::int64_t n, std::int64_t replica) {
  return counter_hash(counter_hash(static_cast<std::uint64_t>(kind) + 1,
                                   static_cast<std::uint64_t>(n)),
                      static_cast<std::uint64_t>(replica + 1));
}

ChargeSequence charges_for(const ExperimentConfig& c, std::int64_t n, std::int64_t replica) {
  if (replica < 0 || c.disorder.kind == DisorderKind::zero) return zero_charges(n);
  return generate(replica_spec(c.disorder, static_cast<std::uint64_t>(replica)), n);
}

// Runs fn(i) for i < count on a bounded pool; results and the first failure
// (lowest index) do not depend on scheduling.
template <class T, class F>
std::vector<T> parallel_map(std::size_t count, unsigned workers, F fn) {
  std::vector<std::optional<T>> out(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  {
    std::vector<std::jthread> pool;
    for (unsigned k = 1; k < w; ++k) pool.emplace_back(work);
    work();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<T> result;
  result.reserve(count);
  for (auto& o : out) result.push_back(std::move(*o));
  return result;
}

void check_path(const RenewalPath& path, std::int64_t n, std::int64_t l, double exact_log_prob) {
  if (!path.well_formed() || path.n() != n)
    throw InvariantViolation("sampled path is not a renewal path ending at n = " +
                             std::to_string(n));
  if (l >= 0 && path.contact_count() != l)
    throw InvariantViolation("sampled path has " + std::to_string(path.contact_count()) +
                             " contacts, expected " + std::to_string(l));
  const double tol = 1e-8 * std::max(1.0, std::abs(exact_log_prob));
  if (std::isfinite(exact_log_prob) && std::abs(path.log_prob - exact_log_prob) > tol)
    throw InvariantViolation("path probability mismatch: sampler " + num(path.log_prob) +
                             ", table " + num(exact_log_prob));
}

void check_report(const GapReport& r) {
  std::uint64_t mass = 0;
  for (auto h : r.histogram) mass += h;
  if (mass != r.samples) throw InvariantViolation("gap histogram mass != sample count");
}

void check_distribution(std::span<const double> dist) {
  CompensatedSum s;
  for (double p : dist) {
    if (!(p >= 0.0)) throw InvariantViolation("negative or NaN probability in the L_n law");
    s.add(p);
  }
  if (std::abs(s.value() - 1.0) > 1e-9) throw InvariantViolation("L_n law does not sum to 1");
}

// Conditioned samples at (n, l); every path is checked against the table.
GapReport sample_gaps(const ExperimentConfig& c, const InterArrivalLaw& law,
                      const ChargeSequence& charges, std::int64_t n, std::int64_t l,
                      std::uint64_t key, std::vector<RenewalPath>* keep = nullptr) {
  const auto table = build_constrained(n, charges, law, {.l_max = l, .target_l = l});
  JobRng rng(c.master_seed, key);
  const auto hash = config_key(c);
  GapAggregator agg(n, hash, l);
  for (std::uint64_t s = 0; s < c.samples; ++s) {
    auto path = sample_conditioned(table, n, l, charges, law, rng);
    check_path(path, n, l, conditioned_log_prob(path, table, charges, law));
    agg.add(path, hash);
    if (keep) keep->push_back(std::move(path));
  }
  auto report = agg.report();
  check_report(report);
  return report;
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return std::nan("");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double se_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1)) /
         std::sqrt(static_cast<double>(xs.size()));
}

// ---------------------------------------------------------------- E1, E2

Table run_pure_gaps(const ExperimentConfig& c, const InterArrivalLaw& law, unsigned workers) {
  const PureCurves curves(law);
  const bool big = c.experiment == K::E1_pure_bigjump;
  Table t;
  t.columns = {"n", "l", "feasible", "samples", "regime", "prediction", "mean_M",
               "mean_M_over_n", "mean_M_over_logn", "median_M_over_logn", "q10_M", "q50_M",
               "q90_M", "frac_outside_eps", "exceed_frac_c"};
  const auto& ladder = c.n_ladder;
  auto reports = parallel_map<std::optional<GapReport>>(ladder.size(), workers, [&](std::size_t i) {
    const auto n = ladder[i];
    const auto l = target_contacts(c, n);
    if (!feasible_contacts(law, n, l)) return std::optional<GapReport>{};
    return std::optional<GapReport>{
        sample_gaps(c, law, zero_charges(n), n, l, job_key(c.experiment, n, -1))};
  });
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const auto n = ladder[i];
    const auto l = target_contacts(c, n);
    const double dn = static_cast<double>(n), logn = std::log(dn);
    const double r = static_cast<double>(l) / dn;
    GapPrediction pred{GapRegime::boundary, std::nan("")};
    if (r > 0.0 && r < 1.0) pred = curves.predict_gaps(r);
    std::vector<std::string> row{num(n), num(l), reports[i] ? "1" : "0", num(c.samples),
                                 to_string(pred.regime), num(pred.limit)};
    if (!reports[i]) {
      row.resize(t.columns.size(), kNan);
      row[3] = "0";
    } else {
      const auto& g = *reports[i];
      const double scale = big ? dn : logn;
      row.insert(row.end(),
                 {num(g.mean), num(g.mean / dn), num(g.mean / logn),
                  num(static_cast<double>(g.quantile(0.5)) / logn), num(g.quantile(0.1)),
                  num(g.quantile(0.5)), num(g.quantile(0.9)),
                  num(g.outside_fraction(scale, pred.limit, c.epsilon)),
                  num(g.exceed_fraction(c.c))});
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------- E3

Table run_disorder_gaps(const ExperimentConfig& c, const InterArrivalLaw& law, unsigned workers) {
  const PureCurves curves(law);
  struct Job {
    std::int64_t n;
    std::int64_t replica;  // -1: pure control
  };
  std::vector<Job> jobs;
  for (auto n : c.n_ladder) {
    jobs.push_back({n, -1});
    for (std::uint64_t k = 0; k < c.replicas; ++k) jobs.push_back({n, static_cast<std::int64_t>(k)});
  }
  auto reports = parallel_map<std::optional<GapReport>>(jobs.size(), workers, [&](std::size_t i) {
    const auto [n, k] = jobs[i];
    const auto l = target_contacts(c, n);
    if (!feasible_contacts(law, n, l)) return std::optional<GapReport>{};
    return std::optional<GapReport>{
        sample_gaps(c, law, charges_for(c, n, k), n, l, job_key(c.experiment, n, k))};
  });

  Table t;
  t.columns = {"n", "l", "kind", "replica", "feasible", "samples", "prediction",
               "mean_M_over_n", "se_M_over_n", "mean_M_over_logn", "se_M_over_logn",
               "exceed_frac_c"};
  std::size_t j = 0;
  for (auto n : c.n_ladder) {
    const auto l = target_contacts(c, n);
    const double dn = static_cast<double>(n), logn = std::log(dn);
    const double r = static_cast<double>(l) / dn;
    const double pred = (r > 0.0 && r < 1.0) ? curves.predict_gaps(r).limit : std::nan("");
    auto emit = [&](const std::string& kind, const std::string& rep, bool ok,
                    std::uint64_t samples, double mn, double sen, double ml, double sel,
                    double ex) {
      if (!ok) {
        t.rows.push_back({num(n), num(l), kind, rep, "0", "0", num(pred), kNan, kNan, kNan,
                          kNan, kNan});
        return;
      }
      t.rows.push_back({num(n), num(l), kind, rep, "1", num(samples), num(pred), num(mn),
                        num(sen), num(ml), num(sel), num(ex)});
    };
    auto se_single = [](const GapReport& g) {
      return g.samples > 1 ? g.stddev / std::sqrt(static_cast<double>(g.samples)) : 0.0;
    };
    const auto& pure = reports[j++];
    if (pure)
      emit("pure", "-1", true, pure->samples, pure->mean / dn, se_single(*pure) / dn,
           pure->mean / logn, se_single(*pure) / logn, pure->exceed_fraction(c.c));
    else
      emit("pure", "-1", false, 0, 0, 0, 0, 0, 0);

    std::vector<double> per_n, per_log;
    double exceed = 0.0;
    std::uint64_t total = 0;
    bool ok = true;
    for (std::uint64_t k = 0; k < c.replicas; ++k) {
      const auto& g = reports[j++];
      if (!g) {
        ok = false;
        emit("replica", num(k), false, 0, 0, 0, 0, 0, 0);
        continue;
      }
      per_n.push_back(g->mean / dn);
      per_log.push_back(g->mean / logn);
      exceed += g->exceed_fraction(c.c) * static_cast<double>(g->samples);
      total += g->samples;
      emit("replica", num(k), true, g->samples, g->mean / dn, se_single(*g) / dn,
           g->mean / logn, se_single(*g) / logn, g->exceed_fraction(c.c));
    }
    emit("disordered", "all", ok, total, mean_of(per_n), se_of(per_n), mean_of(per_log),
         se_of(per_log), total ? exceed / static_cast<double>(total) : 0.0);
  }
  return t;
}

// ---------------------------------------------------------------- E4

Table run_lclt(const ExperimentConfig& c, const InterArrivalLaw& law, unsigned workers) {
  struct Job {
    std::int64_t n;
    std::int64_t replica;
  };
  std::vector<Job> jobs;
  for (auto n : c.n_ladder) {
    jobs.push_back({n, -1});
    if (has_disorder(c))
      for (std::uint64_t k = 0; k < c.replicas; ++k)
        jobs.push_back({n, static_cast<std::int64_t>(k)});
  }
  struct Out {
    QuenchedEstimate est;
    double mean = 0.0;
    double residual = 0.0;
  };
  auto outs = parallel_map<Out>(jobs.size(), workers, [&](std::size_t i) {
    const auto [n, k] = jobs[i];
    const auto charges = charges_for(c, n, k);
    const PolymerParams params{n, c.h};
    const auto table = build_constrained(n, charges, law);
    const auto dist = ln_distribution(table, c.h);
    check_distribution(dist);
    const Moments m = ln_moments(dist);
    const Moments fm = free_moments(params, charges, law);
    if (std::abs(m.mean - fm.mean) > 1e-6 * std::max(1.0, fm.mean))
      throw InvariantViolation("E[L_n] from the constrained table disagrees with the free table");
    Out o;
    o.est = estimate_quenched(params, charges, law);
    o.mean = m.mean;
    const double v = m.variance / static_cast<double>(n);
    o.residual = v > 0.0 ? lclt_residual(dist, m.mean, v) : std::nan("");
    return o;
  });
  Table t;
  t.columns = {"n", "kind", "replica", "h", "f_hat", "rho_hat", "v_hat", "error_bar",
               "mean_L", "residual"};
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& o = outs[i];
    t.rows.push_back({num(jobs[i].n), jobs[i].replica < 0 ? "pure" : "disordered",
                      num(jobs[i].replica), num(c.h), num(o.est.f_hat), num(o.est.rho_hat),
                      num(o.est.v_hat), num(o.est.error_bar), num(o.mean), num(o.residual)});
  }
  return t;
}

// ---------------------------------------------------------------- E5

std::vector<double> general_second_differences(const std::vector<double>& r,
                                               const std::vector<double>& v) {
  std::vector<double> d2(r.size(), std::nan(""));
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    const double left = (v[i] - v[i - 1]) / (r[i] - r[i - 1]);
    const double right = (v[i + 1] - v[i]) / (r[i + 1] - r[i]);
    d2[i] = 2.0 * (right - left) / (r[i + 1] - r[i - 1]);
  }
  return d2;
}

Table run_rate(const ExperimentConfig& c, const InterArrivalLaw& law, unsigned workers) {
  const PureCurves curves(law);
  struct Job {
    std::int64_t n;
    std::int64_t replica;
  };
  std::vector<Job> jobs;
  for (auto n : c.n_ladder) {
    jobs.push_back({n, -1});
    if (has_disorder(c))
      for (std::uint64_t k = 0; k < c.replicas; ++k)
        jobs.push_back({n, static_cast<std::int64_t>(k)});
  }
  auto laws = parallel_map<std::vector<double>>(jobs.size(), workers, [&](std::size_t i) {
    const auto [n, k] = jobs[i];
    const auto table = build_constrained(n, charges_for(c, n, k), law);
    auto log_law = ln_log_distribution(table, c.h);
    std::vector<double> p(log_law.size());
    std::transform(log_law.begin(), log_law.end(), p.begin(), [](double x) { return std::exp(x); });
    check_distribution(p);
    return log_law;
  });
  Table t;
  t.columns = {"n", "kind", "replica", "r", "l", "feasible", "I_hat", "second_diff", "I_ref"};
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    std::vector<double> vals;
    std::vector<RatePoint> pts;
    for (double r : c.r_grid) {
      pts.push_back(empirical_rate(laws[i], r));
      vals.push_back(pts.back().value);
    }
    const auto d2 = general_second_differences(c.r_grid, vals);
    for (std::size_t g = 0; g < pts.size(); ++g) {
      const auto& p = pts[g];
      const bool d2_ok = g > 0 && g + 1 < pts.size() && pts[g - 1].feasible && p.feasible &&
                         pts[g + 1].feasible;
      t.rows.push_back({num(jobs[i].n), jobs[i].replica < 0 ? "pure" : "disordered",
                        num(jobs[i].replica), num(p.r), num(p.l), p.feasible ? "1" : "0",
                        p.feasible ? num(p.value) : kNan, d2_ok ? num(d2[g]) : kNan,
                        num(curves.rate(c.h, p.r))});
    }
  }
  return t;
}

// ---------------------------------------------------------------- E6

Table run_windows(const ExperimentConfig& c, const InterArrivalLaw& law, unsigned workers) {
  struct Job {
    std::int64_t n;
    std::int64_t replica;
  };
  std::vector<Job> jobs;
  for (auto n : c.n_ladder)
    for (std::uint64_t k = 0; k < c.replicas; ++k) jobs.push_back({n, static_cast<std::int64_t>(k)});
  auto stats = parallel_map<std::vector<double>>(jobs.size(), workers, [&](std::size_t i) {
    const auto [n, k] = jobs[i];
    const auto l = target_contacts(c, n);
    if (!feasible_contacts(law, n, l)) return std::vector<double>{};
    const auto w = c.window ? std::min(*c.window, n) : default_window(n);
    std::vector<RenewalPath> paths;
    sample_gaps(c, law, charges_for(c, n, k), n, l, job_key(c.experiment, n, k), &paths);
    std::vector<double> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.push_back(window_density_max(p, w));
    return out;
  });
  Table t;
  t.columns = {"n", "l", "replica", "window", "feasible", "samples", "mean_stat", "median_stat",
               "q90_stat", "max_stat"};
  auto emit = [&](std::int64_t n, const std::string& rep, std::vector<double> xs) {
    const auto l = target_contacts(c, n);
    const auto w = c.window ? std::min(*c.window, n) : default_window(n);
    if (xs.empty()) {
      t.rows.push_back({num(n), num(l), rep, num(w), "0", "0", kNan, kNan, kNan, kNan});
      return;
    }
    std::sort(xs.begin(), xs.end());
    auto q = [&](double p) {
      return xs[std::min(xs.size() - 1, static_cast<std::size_t>(p * static_cast<double>(xs.size())))];
    };
    t.rows.push_back({num(n), num(l), rep, num(w), "1", num(static_cast<std::uint64_t>(xs.size())),
                      num(mean_of(xs)), num(q(0.5)), num(q(0.9)), num(xs.back())});
  };
  std::size_t j = 0;
  for (auto n : c.n_ladder) {
    std::vector<double> pooled;
    bool ok = true;
    for (std::uint64_t k = 0; k < c.replicas; ++k, ++j) {
      emit(n, num(k), stats[j]);
      if (stats[j].empty()) ok = false;
      pooled.insert(pooled.end(), stats[j].begin(), stats[j].end());
    }
    if (c.replicas > 1) emit(n, "all", ok ? pooled : std::vector<double>{});
  }
  return t;
}

// ---------------------------------------------------------------- E7, E8

struct DensityOut {
  std::int64_t mode_l = 0;
  double log_event = 0.0;  // E8: log P[event] at h
  std::vector<double> density, gap_n, gap_log;
  std::uint64_t exceed = 0;
};

Table run_density_models(const ExperimentConfig& c, const InterArrivalLaw& law,
                         unsigned workers) {
  const bool umodel = c.experiment == K::E7_umodel;
  struct Job {
    std::int64_t n;
    std::int64_t replica;
  };
  std::vector<Job> jobs;
  for (auto n : c.n_ladder)
    for (std::uint64_t k = 0; k < c.replicas; ++k) jobs.push_back({n, static_cast<std::int64_t>(k)});
  const auto u = c.potential.function();
  auto outs = parallel_map<std::optional<DensityOut>>(jobs.size(), workers, [&](std::size_t i) {
    const auto [n, k] = jobs[i];
    const auto charges = charges_for(c, n, k);
    const auto table = build_constrained(n, charges, law);
    std::vector<double> count_law;
    DensityOut o;
    if (umodel) {
      count_law = umodel_count_law(table, u);
    } else {
      count_law = soft_count_law(table, *c.r, c.side, c.h);
      const auto full = ln_log_distribution(table, c.h);
      LogSumAccumulator acc;
      for (std::size_t l = 0; l < full.size(); ++l)
        if (std::isfinite(count_law[l])) acc.add(full[l]);
      o.log_event = acc.value();
      if (!std::isfinite(o.log_event)) return std::optional<DensityOut>{};
    }
    o.mode_l = std::max_element(count_law.begin(), count_law.end()) - count_law.begin();
    JobRng rng(c.master_seed, job_key(c.experiment, n, k));
    const double dn = static_cast<double>(n), logn = std::log(dn);
    for (std::uint64_t s = 0; s < c.samples; ++s) {
      auto path = umodel ? sample_umodel(table, n, u, charges, law, rng)
                         : sample_soft(table, n, *c.r, c.side, c.h, charges, law, rng);
      const auto l = path.contact_count();
      if (!std::isfinite(count_law[static_cast<std::size_t>(l)]))
        throw InvariantViolation("sampled contact count outside the event");
      check_path(path, n, l,
                 count_law[static_cast<std::size_t>(l)] +
                     conditioned_log_prob(path, table, charges, law));
      o.density.push_back(static_cast<double>(l) / dn);
      o.gap_n.push_back(static_cast<double>(path.max_gap()) / dn);
      o.gap_log.push_back(static_cast<double>(path.max_gap()) / logn);
      if (static_cast<double>(path.max_gap()) > c.c * logn) ++o.exceed;
    }
    return std::optional<DensityOut>{std::move(o)};
  });
  Table t;
  if (umodel)
    t.columns = {"n", "replica", "feasible", "samples", "mode_l", "mean_density",
                 "mean_M_over_n", "mean_M_over_logn", "exceed_frac_c"};
  else
    t.columns = {"n", "replica", "side", "r", "h", "feasible", "log_event_prob", "samples",
                 "mode_l", "mean_density", "min_density", "max_density", "mean_M_over_n",
                 "mean_M_over_logn", "exceed_frac_c"};
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& o = outs[i];
    std::vector<std::string> row{num(jobs[i].n), num(jobs[i].replica)};
    if (!umodel)
      row.insert(row.end(), {c.side == Side::at_least ? "at_least" : "at_most", num(*c.r), num(c.h)});
    if (!o) {
      row.push_back("0");
      row.resize(t.columns.size(), kNan);
      t.rows.push_back(std::move(row));
      continue;
    }
    const double samples = static_cast<double>(o->density.size());
    row.push_back("1");
    if (!umodel) row.push_back(num(o->log_event));
    row.insert(row.end(), {num(static_cast<std::uint64_t>(o->density.size())), num(o->mode_l),
                           num(mean_of(o->density))});
    if (!umodel)
      row.insert(row.end(), {num(*std::min_element(o->density.begin(), o->density.end())),
                             num(*std::max_element(o->density.begin(), o->density.end()))});
    row.insert(row.end(), {num(mean_of(o->gap_n)), num(mean_of(o->gap_log)),
                           num(static_cast<double>(o->exceed) / samples)});
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------- output

std::string render_header(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "# pinning " << kVersion << '\n';
  os << "# experiment=" << to_string(c.experiment) << '\n';
  os << "# config_hash=" << config_hash(c) << '\n';
  os << "# master_seed=" << c.master_seed << '\n';
  os << "# module_versions=" << kModuleVersions << '\n';
  os << "# finite_size_bracket=epsilon:" << format_double(c.epsilon)
     << ",c:" << format_double(c.c) << '\n';
  return os.str();
}

std::string render_body(const Table& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
  return os.str();
}

std::string output_path(const ExperimentConfig& c) {
  return c.output.empty() ? to_string(c.experiment) + ".csv" : c.output;
}

void guard_existing(const std::string& path, const std::string& hash) {
  std::ifstream in(path);
  if (!in) return;
  for (std::string line; std::getline(in, line) && line.starts_with("#");) {
    if (line.starts_with("# config_hash=")) {
      if (line.substr(14) == hash) return;
      throw ConfigError("experiment.output", "'" + path +
                                                 "' holds an artifact with a different config "
                                                 "hash; refusing to overwrite");
    }
  }
  throw ConfigError("experiment.output", "'" + path + "' exists and is not a pinning artifact");
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("experiment.output", "cannot write '" + path + "'");
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

double table_ops(std::int64_t n, std::int64_t support, bool full, std::int64_t l) {
  const double dn = static_cast<double>(n), T = static_cast<double>(support);
  if (full) return std::min(dn * dn * dn / 6.0, dn * dn / 2.0 * T);
  const double dl = static_cast<double>(std::max<std::int64_t>(l, 1));
  const double band = dn - dl + 1.0;
  return std::min(dl * band * band / 2.0, dl * band * T);
}

}  // namespace

std::string to_string(Finding::Level level) {
  switch (level) {
    case Finding::Level::error: return "error";
    case Finding::Level::infeasible: return "infeasible";
    case Finding::Level::warning: return "warning";
  }
  return "?";
}

bool ValidationReport::has_errors() const {
  return std::any_of(findings.begin(), findings.end(),
                     [](const Finding& f) { return f.level == Finding::Level::error; });
}

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

const std::string& Table::cell(std::size_t row, const std::string& name) const {
  return rows.at(row).at(column(name));
}

double Table::number(std::size_t row, const std::string& name) const {
  const auto& s = cell(row, name);
  if (s == "nan") return std::nan("");
  if (s == "inf") return kInf;
  if (s == "-inf") return kNegInf;
  return std::stod(s);
}

std::vector<std::size_t> Table::where(const std::string& name, const std::string& value) const {
  std::vector<std::size_t> out;
  const auto col = column(name);
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i][col] == value) out.push_back(i);
  return out;
}

unsigned workers_from_env() {
  if (const char* env = std::getenv("PINNING_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw ConfigError("PINNING_WORKERS", "expected a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::int64_t target_contacts(const ExperimentConfig& c, std::int64_t n) {
  if (c.l) return *c.l;
  const double dn = static_cast<double>(n);
  if (c.r) return static_cast<std::int64_t>(std::floor(*c.r * dn + 1e-9));
  // disorder-vs-pure default: half the critical density
  const auto law = InterArrivalLaw::build(c.law);
  return static_cast<std::int64_t>(std::floor(0.5 * PureCurves(law).rho_c() * dn));
}

bool feasible_contacts(const InterArrivalLaw& law, std::int64_t n, std::int64_t l) {
  if (l < 1 || l > n) return false;
  return l * law.support() >= n;
}

ValidationReport validate(const ExperimentConfig& c) {
  ValidationReport rep;
  std::optional<InterArrivalLaw> law;
  try {
    law = InterArrivalLaw::build(c.law);
  } catch (const std::exception& e) {
    rep.findings.push_back({Finding::Level::error, "law", e.what()});
    return rep;
  }
  const bool full = needs_full_table(c.experiment);
  const bool conditioned = !full && c.experiment != K::E4_lclt;
  const double reps = static_cast<double>(c.replicas);
  double jobs = reps;
  switch (c.experiment) {
    case K::E1_pure_bigjump:
    case K::E2_pure_loggap: jobs = 1.0; break;
    case K::E3_disorder_nogap: jobs = 1.0 + reps; break;
    case K::E4_lclt:
    case K::E5_rate_convexity: jobs = 1.0 + (has_disorder(c) ? reps : 0.0); break;
    default: break;
  }
  for (auto n : c.n_ladder) {
    std::int64_t l = n;
    if (conditioned) {
      l = target_contacts(c, n);
      if (l > n)
        rep.findings.push_back({Finding::Level::infeasible, "experiment.l",
                                "n = " + std::to_string(n) + ": l = " + std::to_string(l) +
                                    " exceeds n"});
      else if (!feasible_contacts(*law, n, l))
        rep.findings.push_back({Finding::Level::infeasible, "experiment.l",
                                "n = " + std::to_string(n) + ": l = " + std::to_string(l) +
                                    " contacts cannot cover n with gaps <= " +
                                    std::to_string(law->support())});
    }
    const std::uint64_t entries =
        full ? constrained_entries(n)
             : constrained_entries(n, {.l_max = std::clamp<std::int64_t>(l, 0, n),
                                       .target_l = std::clamp<std::int64_t>(l, 0, n)});
    rep.peak_table_entries = std::max(rep.peak_table_entries, entries);
    if (entries > kMaxTableEntries)
      rep.findings.push_back({Finding::Level::error, "experiment.n_ladder",
                              "n = " + std::to_string(n) + ": constrained table needs " +
                                  std::to_string(entries) + " entries, above the guard of " +
                                  std::to_string(kMaxTableEntries)});
    const double ops = table_ops(n, law->support(), full, std::clamp<std::int64_t>(l, 1, n));
    const double sampling = c.experiment == K::E4_lclt || c.experiment == K::E5_rate_convexity
                                ? 0.0
                                : static_cast<double>(c.samples) * static_cast<double>(n) * 5e-9;
    rep.estimated_seconds += jobs * (ops * 1e-9 + sampling);
  }
  rep.peak_table_bytes = static_cast<double>(rep.peak_table_entries) * sizeof(double);
  if (c.window)
    for (auto n : c.n_ladder)
      if (*c.window > n)
        rep.findings.push_back({Finding::Level::warning, "experiment.window",
                                "window exceeds n = " + std::to_string(n) + "; clamped"});
  return rep;
}

RunResult run(const ExperimentConfig& config, const RunOptions& options) {
  const auto report = validate(config);
  for (const auto& f : report.findings)
    if (f.level == Finding::Level::error) throw ConfigError(f.field, f.message);
  const auto law = InterArrivalLaw::build(config.law);

  RunResult res;
  const unsigned w = std::max(1u, options.workers);
  switch (config.experiment) {
    case K::E1_pure_bigjump:
    case K::E2_pure_loggap: res.table = run_pure_gaps(config, law, w); break;
    case K::E3_disorder_nogap: res.table = run_disorder_gaps(config, law, w); break;
    case K::E4_lclt: res.table = run_lclt(config, law, w); break;
    case K::E5_rate_convexity: res.table = run_rate(config, law, w); break;
    case K::E6_mesoscopic: res.table = run_windows(config, law, w); break;
    case K::E7_umodel:
    case K::E8_soft: res.table = run_density_models(config, law, w); break;
  }
  res.header = render_header(config);
  res.body = render_body(res.table);
  if (options.write) {
    res.path = output_path(config);
    guard_existing(res.path, config_hash(config));
    write_atomic(res.path, res.header + res.body);
  }
  return res;
}

}  // namespace pinning
