#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "pinning/dp_engine.hpp"
#include "pinning/log_math.hpp"
#include "pinning/sampler.hpp"
#include "support.hpp"

using namespace pinning;
using namespace testing_support;

namespace {

using Freq = std::map<std::vector<std::int64_t>, std::uint64_t>;

// every path: |emp - p| <= 5 sqrt(p (1 - p) / N) + 1/N
void check_frequencies(const Freq& freq, const std::map<std::vector<std::int64_t>, long double>& exact,
                       std::uint64_t samples) {
  const double N = static_cast<double>(samples);
  for (const auto& [sites, count] : freq) CHECK(exact.contains(sites));
  for (const auto& [sites, pl] : exact) {
    const double p = static_cast<double>(pl);
    const auto it = freq.find(sites);
    const double emp = it == freq.end() ? 0.0 : static_cast<double>(it->second) / N;
    CHECK(std::abs(emp - p) <= 5.0 * std::sqrt(p * (1 - p) / N) + 1.0 / N);
  }
}

}  // namespace

TEST_SUITE("sampler") {
  TEST_CASE("trivial paths") {
    const auto law = alpha2();
    JobRng rng(1, 1);
    const auto z1 = build_free({1, 0.0}, zero_charges(1), law);
    const auto p1 = sample_free(z1, {1, 0.0}, zero_charges(1), law, rng);
    CHECK(p1.sites == std::vector<std::int64_t>{0, 1});
    CHECK(p1.log_prob == doctest::Approx(0.0));

    const std::int64_t n = 30;
    const auto ch = generate({DisorderKind::gaussian, 1.0, 3}, n);
    const auto t = build_constrained(n, ch, law);
    const auto packed = sample_conditioned(t, n, n, ch, law, rng);
    CHECK(packed.contact_count() == n);
    CHECK(packed.max_gap() == 1);
    CHECK(packed.log_prob == doctest::Approx(0.0));
    const auto single = sample_conditioned(t, n, 1, ch, law, rng);
    CHECK(single.sites == std::vector<std::int64_t>{0, n});
    CHECK(single.log_prob == doctest::Approx(0.0));
  }

  TEST_CASE("two-point law, n = 2: P[(0,2)] = 0.238095") {
    const auto law = two_point();
    const auto z = build_free({2, 0.0}, zero_charges(2), law);
    JobRng rng(5, 0);
    std::uint64_t hits = 0;
    const std::uint64_t N = 200000;
    for (std::uint64_t s = 0; s < N; ++s)
      if (sample_free(z, {2, 0.0}, zero_charges(2), law, rng).contact_count() == 1) ++hits;
    const double p = 0.2 / 0.84;
    CHECK(std::abs(hits / static_cast<double>(N) - p) < 5 * std::sqrt(p * (1 - p) / N));
  }

  TEST_CASE("free, conditioned, soft and U-model samplers match enumeration at n = 7") {
    const auto law = alpha2();
    const std::int64_t n = 7;
    const double h = 0.3;
    const auto ch = generate({DisorderKind::gaussian, 0.5, 21}, n);
    const auto bf = brute(law, ch, n, h);
    const auto table = build_constrained(n, ch, law);
    const auto z = build_free({n, h}, ch, law);
    const std::uint64_t N = 200000;

    Freq free_f, cond_f, soft_f, u_f;
    JobRng r1(9, 1), r2(9, 2), r3(9, 3), r4(9, 4);
    for (std::uint64_t s = 0; s < N; ++s) {
      ++free_f[sample_free(z, {n, h}, ch, law, r1).sites];
      ++cond_f[sample_conditioned(table, n, 3, ch, law, r2).sites];
      ++soft_f[sample_soft(table, n, 0.5, Side::at_least, h, ch, law, r3).sites];
      ++u_f[sample_umodel(table, n, [h](double r) { return h * r; }, ch, law, r4).sites];
    }
    const auto exact = bf.path_probs();
    check_frequencies(free_f, exact, N);
    check_frequencies(u_f, exact, N);
    check_frequencies(cond_f, bf.conditional_probs(3), N);

    std::map<std::vector<std::int64_t>, long double> soft_exact;
    long double mass = 0;
    for (const auto& [sites, p] : exact)
      if (static_cast<double>(sites.size() - 1) >= 0.5 * n) mass += p;
    for (const auto& [sites, p] : exact)
      if (static_cast<double>(sites.size() - 1) >= 0.5 * n) soft_exact[sites] = p / mass;
    check_frequencies(soft_f, soft_exact, N);
  }

  TEST_CASE("path-probability identity per sample") {
    const auto law = alpha1_log();
    const std::int64_t n = 300;
    const auto ch = generate({DisorderKind::gaussian, 1.0, 14}, n);
    const double h = 0.5;
    const auto z = build_free({n, h}, ch, law);
    const auto table = build_constrained(n, ch, law);
    JobRng rng(3, 3);
    for (int s = 0; s < 200; ++s) {
      const auto p = sample_free(z, {n, h}, ch, law, rng);
      CHECK(p.well_formed());
      CHECK(p.n() == n);
      const double exact = log_path_weight(p, h, ch, law) - z.back();
      CHECK(std::abs(p.log_prob - exact) <= 1e-12 * std::max(1.0, std::abs(exact)) * 100);
      const auto c = sample_conditioned(table, n, 120, ch, law, rng);
      CHECK(c.contact_count() == 120);
      const double ce = conditioned_log_prob(c, table, ch, law);
      CHECK(std::abs(c.log_prob - ce) <= 1e-10 * std::max(1.0, std::abs(ce)));
      std::int64_t sum = 0;
      for (auto g : c.gaps()) {
        CHECK(g >= 1);
        sum += g;
      }
      CHECK(sum == n);
    }
  }

  TEST_CASE("band tables serve the conditioned sampler") {
    const auto law = alpha2();
    const std::int64_t n = 400, l = 150;
    const auto ch = generate({DisorderKind::rademacher, 1.0, 2}, n);
    const auto band = build_constrained(n, ch, law, {.l_max = l, .target_l = l});
    JobRng rng(1, 2);
    for (int s = 0; s < 50; ++s) {
      const auto p = sample_conditioned(band, n, l, ch, law, rng);
      CHECK(p.contact_count() == l);
      CHECK(p.log_prob == doctest::Approx(conditioned_log_prob(p, band, ch, law)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(sample_conditioned(band, n, l + 1, ch, law, rng), std::invalid_argument);
  }

  TEST_CASE("same seed gives the same stream") {
    const auto law = alpha2();
    const std::int64_t n = 200;
    const auto ch = generate({DisorderKind::gaussian, 1.0, 1}, n);
    const auto table = build_constrained(n, ch, law);
    JobRng a(77, 5), b(77, 5), c(77, 6);
    bool differs = false;
    for (int s = 0; s < 20; ++s) {
      const auto pa = sample_conditioned(table, n, 80, ch, law, a);
      const auto pb = sample_conditioned(table, n, 80, ch, law, b);
      const auto pc = sample_conditioned(table, n, 80, ch, law, c);
      CHECK(pa == pb);
      differs = differs || !(pa == pc);
    }
    CHECK(differs);
  }

  TEST_CASE("infeasible and empty events") {
    const auto law = two_point();
    const std::int64_t n = 10;
    const auto table = build_constrained(n, zero_charges(n), law);
    JobRng rng(1, 1);
    CHECK_THROWS_AS(sample_conditioned(table, n, 3, zero_charges(n), law, rng), InfeasibleError);
    CHECK_THROWS_AS(sample_conditioned(table, n, 0, zero_charges(n), law, rng), InfeasibleError);
    CHECK_THROWS_AS(sample_conditioned(table, n, 11, zero_charges(n), law, rng), InfeasibleError);
    CHECK_THROWS_AS(sample_soft(table, n, 0.3, Side::at_most, 0.0, zero_charges(n), law, rng),
                    InfeasibleError);
    const auto ok = sample_soft(table, n, 0.5, Side::at_most, 0.0, zero_charges(n), law, rng);
    CHECK(ok.contact_count() == 5);
  }

  TEST_CASE("soft edge cases") {
    const auto law = alpha2();
    const std::int64_t n = 12;
    const auto ch = generate({DisorderKind::gaussian, 1.0, 6}, n);
    const auto table = build_constrained(n, ch, law);
    JobRng rng(2, 2);
    for (int s = 0; s < 20; ++s) {
      const auto p = sample_soft(table, n, 1.0, Side::at_least, 0.0, ch, law, rng);
      CHECK(p.contact_count() == n);
    }
    // r = 1/n, at least: the event is sure, so the count law is the free one
    const auto sure = soft_count_law(table, 1.0 / n, Side::at_least, 0.4);
    const auto full = ln_log_distribution(table, 0.4);
    for (std::size_t l = 1; l < sure.size(); ++l) CHECK(sure[l] == doctest::Approx(full[l]).epsilon(1e-12));
  }

  TEST_CASE("U-model count law") {
    const auto law = alpha2();
    const std::int64_t n = 60;
    const auto ch = generate({DisorderKind::gaussian, 1.0, 6}, n);
    const auto table = build_constrained(n, ch, law);
    const auto zero_u = umodel_count_law(table, [](double) { return 0.0; });
    const auto h0 = ln_log_distribution(table, 0.0);
    for (std::size_t l = 1; l < h0.size(); ++l) CHECK(zero_u[l] == doctest::Approx(h0[l]).epsilon(1e-12));

    auto u = [](double r) { return -10.0 * (r - 0.5) * (r - 0.5); };
    const auto w = umodel_count_law(table, u);
    std::int64_t argmax = 0;
    double best = kNegInf;
    for (std::int64_t l = 1; l <= n; ++l) {
      const double v = n * u(static_cast<double>(l) / n) + table.log_z(n, l);
      if (v > best) best = v, argmax = l;
    }
    CHECK(std::max_element(w.begin(), w.end()) - w.begin() == argmax);
    JobRng rng(4, 4);
    std::map<std::int64_t, int> hist;
    for (int s = 0; s < 20000; ++s) ++hist[sample_umodel(table, n, u, ch, law, rng).contact_count()];
    const auto mode = std::max_element(hist.begin(), hist.end(),
                                       [](auto& a, auto& b) { return a.second < b.second; })->first;
    CHECK(std::abs(mode - argmax) <= 1);

    CHECK_THROWS_AS(umodel_count_law(table, [](double) { return std::nan(""); }), std::invalid_argument);
  }

  TEST_CASE("path export") {
    const std::vector<RenewalPath> paths{path_from_gaps({2, 1}), path_from_gaps({5})};
    std::ostringstream os;
    write_paths_csv(os, 3, paths, true);
    CHECK(os.str() == "replica,sample_id,L_n,M_n,sites\n3,0,2,2,0;2;3\n3,1,1,5,0;5\n");
    std::ostringstream bare;
    write_paths_csv(bare, 0, paths, false, false);
    CHECK(bare.str() == "0,0,2,2\n0,1,1,5\n");
  }
}
