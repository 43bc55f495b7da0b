#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "clusterlab/distribution_lab.hpp"
#include "clusterlab/parallel.hpp"

using namespace clusterlab;

namespace {

RUniformHypergraph hyper(unsigned n, unsigned r, std::vector<std::vector<std::uint32_t>> t) {
  return RUniformHypergraph::from_tuples(n, r, t);
}

// Plain loop over all graphs, no Gray code, no chunking.
std::map<std::vector<VertexMask>, Rational> brute_law(unsigned n, unsigned r, const Rational& p) {
  std::map<std::vector<VertexMask>, Rational> law;
  const unsigned m = n * (n - 1) / 2;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    LabeledGraph g(n);
    unsigned k = 0;
    for (unsigned u = 0; u < n; ++u) {
      for (unsigned v = u + 1; v < n; ++v, ++k) {
        if ((mask >> k) & 1u) g.add_edge(u, v);
      }
    }
    const long e = static_cast<long>(g.edge_count());
    law[clique_hypergraph(g, r).edges()] += rational_pow(p, e) * rational_pow(1 - p, m - e);
  }
  return law;
}

Distribution point_mass(const RUniformHypergraph& h) {
  Distribution d;
  d.n = h.n();
  d.r = h.r();
  d.entries.push_back({h, ExactProb(1), 0});
  return d;
}

const Expectations& expectations_6_3_half() {
  static const Expectations x = [] {
    const Rational p(1, 2);
    return exact_expectations(exact_distribution(6, 3, p), moment_table(6, 3, p));
  }();
  return x;
}

}  // namespace

TEST_CASE("exact distribution examples") {
  auto d = exact_distribution(3, 3, Rational(1, 2));
  REQUIRE(d.entries.size() == 2);
  CHECK(d.entries[0].h.empty());
  CHECK(d.entries[0].prob.rational() == Rational(7, 8));
  CHECK(d.entries[1].prob.rational() == Rational(1, 8));
  auto d4 = exact_distribution(4, 3, Rational(1, 2));
  CHECK(d4.find(hyper(4, 3, {}))->prob.rational() == Rational(41, 64));
  CHECK(d4.total().rational() == 1);
  CHECK(d4.find(hyper(4, 3, {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}})) == nullptr);
  CHECK_THROWS_AS(exact_distribution(8, 3, Rational(1, 2)), GuardExceeded);
  CHECK_THROWS(exact_distribution(4, 5, Rational(1, 2)));
  CHECK(exact_distribution(4, 3, Rational(0)).entries.size() == 1);
  CHECK(exact_distribution(4, 3, Rational(1)).entries.back().h.size() == 4);
}

TEST_CASE("exact distribution matches direct enumeration") {
  for (unsigned r : {3u, 4u}) {
    const Rational p(1, 3);
    auto d = exact_distribution(5, r, p, {.workers = 3});
    auto law = brute_law(5, r, p);
    REQUIRE(d.entries.size() == law.size());
    for (const auto& e : d.entries) CHECK(law.at(e.h.edges()) == e.prob.rational());
    for (std::size_t i = 1; i < d.entries.size(); ++i) CHECK(canonical_less(d.entries[i - 1].h, d.entries[i].h));
  }
}

TEST_CASE("moment identities under the exact law") {
  for (auto [n, r] : {std::pair{5u, 3u}, std::pair{6u, 3u}, std::pair{6u, 4u}}) {
    const Rational p(2, 5);
    auto d = exact_distribution(n, r, p);
    auto t = moment_table(n, r, p);
    CHECK(d.total().rational() == 1);
    CHECK(expectation(d, [](const RUniformHypergraph& h) { return Rational(static_cast<unsigned long>(h.size())); }) ==
          t.mu_r.rational());
    CHECK(expectation(d, [](const RUniformHypergraph& h) { return Rational(count_wk(h, 2)); }) ==
          t.delta2.rational());
    for (unsigned k = 0; k < r; ++k) {
      auto tk = [k](const RUniformHypergraph& h) { return Rational(t_counts(h, 2).t_by_size[k]); };
      CHECK(expectation(d, tk) == t.nu[k].rational());
    }
  }
}

TEST_CASE("support equals the realizable hypergraphs") {
  const unsigned n = 5, r = 3;
  auto d = exact_distribution(n, r, Rational(1, 2));
  const auto N = choose_u64(n, r);
  std::size_t realizable = 0;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << N); ++s) {
    std::vector<VertexMask> edges;
    for (std::uint64_t i = 0; i < N; ++i) {
      if ((s >> i) & 1u) edges.push_back(unrank_rset(i, n, r));
    }
    RUniformHypergraph h(n, r, edges);
    const bool ok = is_clique_realizable(h);
    realizable += ok;
    CHECK(ok == (d.find(h) != nullptr));
  }
  CHECK(realizable == d.entries.size());
}

TEST_CASE("star-cluster expectation identity") {
  const Rational p(1, 2);
  auto d = exact_distribution(5, 3, p);
  auto ec = expectation(d, [&](const RUniformHypergraph& h) { return complex_terms(h).eval(p); });
  auto ech = expectation(d, [&](const RUniformHypergraph& h) { return c_hat_terms(h).eval(p); });
  // Σ_S π_1(S) over star-clusters of the complete family.
  std::vector<VertexMask> all;
  for (std::uint64_t i = 0; i < choose_u64(5, 3); ++i) all.push_back(unrank_rset(i, 5, 3));
  Rational pi1 = 0;
  for (const auto& s : star_clusters(RUniformHypergraph(5, 3, all))) pi1 += rational_pow(p, s.leaf_union + s.uncovered);
  CHECK(ec <= ech);
  CHECK(ech == pi1);
  CHECK(sgn(ec) > 0);
}

TEST_CASE("model log-probability") {
  const Rational half(1, 2);
  auto t3 = moment_table(3, 3, half);
  CHECK(std::exp(model_log_prob(hyper(3, 3, {{0, 1, 2}}), t3)) == doctest::Approx(0.125));
  CHECK(model_weight(hyper(3, 3, {{0, 1, 2}}), t3).rational() == Rational(1, 8));
  auto t5 = moment_table(5, 3, half);
  CHECK(model_log_prob(hyper(5, 3, {}), t5) ==
        doctest::Approx(10 * std::log(1 - 0.125) - t5.lambda.to_double()));
  auto two = hyper(5, 3, {{0, 1, 2}, {0, 1, 3}});
  auto apart = hyper(6, 3, {{0, 1, 2}, {3, 4, 5}});
  CHECK(t_of(two) == 1);
  CHECK(model_log_prob(two, t5) - (2 * std::log(0.125) + 8 * std::log(0.875) - t5.lambda.to_double()) ==
        doctest::Approx(std::log(2.0)));
  auto t6 = moment_table(6, 3, half);
  CHECK(model_log_prob(apart, t6, LambdaChoice::kLambdaPrime) ==
        doctest::Approx(2 * std::log(0.125) + 18 * std::log(0.875) - t6.lambda_prime.to_double()));
}

TEST_CASE("total variation") {
  auto d = exact_distribution(4, 3, Rational(1, 2));
  CHECK(tv_distance(d, d).rational() == 0);
  auto a = point_mass(hyper(4, 3, {{0, 1, 2}}));
  auto b = point_mass(hyper(4, 3, {{0, 1, 3}}));
  CHECK(tv_distance(a, b).rational() == 1);
  CHECK(tv_distance(a, d).rational() == 1 - d.find(a.entries[0].h)->prob.rational());
}

TEST_CASE("model comparison at n = 4") {
  const Rational half(1, 2);
  auto d = exact_distribution(4, 3, half);
  auto t = moment_table(4, 3, half);
  auto cmp = compare_with_model(d, t);
  CHECK(cmp.normalized.total().rational() == 1);
  CHECK(cmp.tv_normalized > ExactProb(0));
  CHECK(cmp.tv_normalized < ExactProb(1));
  REQUIRE(cmp.unrealizable_mass.has_value());
  // Unrealizable: the four 3-subsets of the four triangles of K_4, each with
  // t = 9 - 6 = 3.
  const double pi = 0.125;
  const double lambda = t.lambda.to_double();
  CHECK(*cmp.unrealizable_mass == doctest::Approx(4 * std::pow(pi, 3) * (1 - pi) * std::pow(2.0, 3) * std::exp(-lambda)));
  double total_model = cmp.realizable_mass + *cmp.unrealizable_mass;
  // Summed over all 16 hypergraphs the model has mass e^{-Λ} Σ_H π^e (1-π)^{4-e} p^{-t}.
  double direct = 0;
  for (unsigned s = 0; s < 16; ++s) {
    std::vector<VertexMask> edges;
    for (unsigned i = 0; i < 4; ++i) {
      if ((s >> i) & 1u) edges.push_back(unrank_rset(i, 4, 3));
    }
    direct += std::exp(model_log_prob(RUniformHypergraph(4, 3, edges), t));
  }
  CHECK(total_model == doctest::Approx(direct));
  CHECK(cmp.tv_unnormalized >= 0);
}

TEST_CASE("predicates: degenerate and hand-built cases") {
  const auto& x = expectations_6_3_half();
  auto cfg = default_predicate_config(x);
  CHECK(cfg.omega == doctest::Approx(std::log(std::log(6.0)) + 3));
  auto bad = hyper(6, 3, {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}});
  auto rep = is_good(bad, cfg);
  CHECK_FALSE(rep.holds);
  CHECK(rep.failed.front() == "not H_r(G)");

  auto strict = cfg;
  strict.omega = 1;  // μ = 5/2 > ω√μ
  auto empty = is_good(hyper(6, 3, {}), strict);
  CHECK_FALSE(empty.holds);
  CHECK(empty.failed == std::vector<std::string>{"|e(H)-mu_r| > omega*sqrt(mu_r)"});

  auto big = default_predicate_config(Expectations{moment_table(20, 3, Rational(1, 2))});
  // μ_3 = 142.5 > 20^0.8.
  auto pl = is_plausible(RUniformHypergraph(20, 3), big);
  CHECK_FALSE(pl.holds);
  CHECK(pl.failed.back() == "|e(H)-mu_r| > n^(1-delta)");
  CHECK_THROWS_AS(is_good(RUniformHypergraph(20, 3), big), std::invalid_argument);

  auto r5 = default_predicate_config(Expectations{moment_table(8, 5, Rational(1, 2))});
  auto shares3 = hyper(8, 5, {{0, 1, 2, 3, 4}, {0, 1, 2, 5, 6}});
  auto p5 = is_plausible(shares3, r5);
  CHECK_FALSE(p5.holds);
  CHECK(std::find(p5.failed.begin(), p5.failed.end(), "t_3 != 0") != p5.failed.end());

  auto wrong = cfg;
  wrong.plaus_delta = 0.3;
  CHECK_THROWS(is_plausible(bad, wrong));
}

TEST_CASE("predicates on sampled outcomes") {
  const auto& x = expectations_6_3_half();
  CHECK(x.q2->value == doctest::Approx(moment_table(6, 3, Rational(1, 2)).delta2.to_double()));
  auto loose = default_predicate_config(x);
  loose.omega = 10;
  auto cfg = default_predicate_config(x);
  RngStream rng(31, 0);
  int good = 0, well = 0;
  const int trials = 200;
  for (int i = 0; i < trials; ++i) {
    auto h = clique_hypergraph(sample_gnp(6, Rational(1, 2), rng), 3);
    good += is_good(h, loose).holds;
    well += is_well_behaved(h, cfg).holds;
    if (is_reasonable(h, cfg).holds) CHECK(is_plausible(h, cfg).holds);
  }
  CHECK(good >= trials * 9 / 10);
  CHECK(well >= trials * 8 / 10);
}

TEST_CASE("Monte Carlo summaries") {
  const Rational p(1, 5);
  McOptions one;
  McOptions three;
  three.workers = 3;
  auto a = monte_carlo_stats(12, 3, p, 400, 5, one);
  auto b = monte_carlo_stats(12, 3, p, 400, 5, three);
  CHECK(a.stats.size() == b.stats.size());
  for (std::size_t i = 0; i < a.stats.size(); ++i) {
    CHECK(a.stats[i].mean == b.stats[i].mean);
    CHECK(a.stats[i].stderr == b.stats[i].stderr);
  }
  auto t = moment_table(12, 3, p);
  CHECK(std::abs(a.at("e").mean - t.mu_r.to_double()) < 4 * a.at("e").stderr);
  CHECK(std::abs(a.at("W2").mean - t.delta2.to_double()) < 4 * a.at("W2").stderr);

  McOptions heavy;
  heavy.heavy = true;
  heavy.predicates = default_predicate_config(Expectations{moment_table(7, 3, Rational(1, 2))});
  auto h = monte_carlo_stats(7, 3, Rational(1, 2), 300, 9, heavy);
  CHECK(h.at("C").mean <= h.at("C_hat").mean);
  CHECK(h.at("C_hat_L").mean <= h.at("C_hat").mean);
  CHECK(h.at("plausible").count == 300);
  CHECK_THROWS_AS(h.at("good"), std::out_of_range);
  auto est = estimated_expectations(h, moment_table(7, 3, Rational(1, 2)));
  CHECK(est.q3.has_value());
  CHECK(est.delta3->value == h.at("W3").mean);

  std::ostringstream csv;
  write_csv(csv, a);
  CHECK(csv.str().rfind("statistic,mean,stderr,count\ne,", 0) == 0);
}

TEST_CASE("empirical law approaches the exact law") {
  const Rational p(1, 2);
  auto exact = exact_distribution(4, 3, p);
  auto emp = empirical_distribution(4, 3, p, 20000, 3, 2);
  CHECK(emp.mode == Distribution::Mode::kEstimated);
  CHECK(emp.total().rational() == 1);
  CHECK(tv_distance(exact, emp).to_double() < 0.03);
}

TEST_CASE("jsonl output") {
  std::ostringstream out;
  write_jsonl(out, exact_distribution(3, 3, Rational(1, 2)));
  CHECK(out.str() == "{\"edges\":[],\"prob\":\"7/8\"}\n{\"edges\":[[0,1,2]],\"prob\":\"1/8\"}\n");
}
