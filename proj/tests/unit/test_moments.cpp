#include <doctest.h>

#include <cmath>

#include "clusterlab/moments.hpp"

using namespace clusterlab;

namespace {

std::vector<VertexMask> all_rsets(unsigned n, unsigned r) {
  std::vector<VertexMask> out;
  for (std::uint64_t i = 0; i < choose_u64(n, r); ++i) out.push_back(unrank_rset(i, n, r));
  return out;
}

// Σ over unordered pairs of distinct overlapping r-sets of p^{|E_i ∪ E_j|}.
Rational pair_sum(unsigned n, unsigned r, const Rational& p, bool independent) {
  const auto sets = all_rsets(n, r);
  Rational total = 0;
  for (std::size_t a = 0; a < sets.size(); ++a) {
    for (std::size_t b = a + 1; b < sets.size(); ++b) {
      if (popcount(sets[a] & sets[b]) < 2) continue;
      const VertexMask both[] = {sets[a], sets[b]};
      total += rational_pow(p, independent ? 2 * pairs_in(r) : covered_pairs(both, 2));
    }
  }
  return total;
}

}  // namespace

TEST_CASE("moment table examples") {
  const Rational half(1, 2);
  CHECK(moment_table(4, 3, half).mu_r.rational() == Rational(1, 2));
  auto t = moment_table(5, 3, half);
  CHECK(t.nu[2].rational() == Rational(15, 16));
  CHECK(t.delta2.rational() == Rational(15, 16));
  CHECK(t.delta2_0.rational() == Rational(15, 32));
  CHECK(t.lambda.rational() == Rational(15, 32));
  CHECK(t.lambda_prime == t.lambda);
  auto x = moment_table(10, 3, Rational(1, 10));
  CHECK(x.xi.rational() == Rational(11, 100));
  CHECK(x.xi_parts[0].rational() == Rational(1, 100));
  CHECK(x.xi_parts[1].rational() == Rational(1, 10));
  CHECK_THROWS(moment_table(4, 5, half));
  CHECK_THROWS(moment_table(5, 3, Rational(1)));
}

TEST_CASE("expected clique count by graph enumeration") {
  const Rational p(1, 3);
  Rational mean = 0;
  for (unsigned m = 0; m < (1u << 10); ++m) {
    LabeledGraph g(5);
    unsigned k = 0;
    for (unsigned u = 0; u < 5; ++u) {
      for (unsigned v = u + 1; v < 5; ++v, ++k) {
        if ((m >> k) & 1u) g.add_edge(u, v);
      }
    }
    const auto e = static_cast<long>(g.edge_count());
    mean += clique_hypergraph(g, 3).size() * rational_pow(p, e) * rational_pow(1 - p, 10 - e);
  }
  CHECK(moment_table(5, 3, p).mu_r.rational() == mean);
}

TEST_CASE("delta2 identities across a grid") {
  for (unsigned n : {5u, 6u, 7u}) {
    for (unsigned r : {3u, 4u}) {
      if (r > n) continue;
      for (const Rational& p : {Rational(1, 4), Rational(2, 3)}) {
        auto t = moment_table(n, r, p);
        CHECK(t.delta2.rational() == pair_sum(n, r, p, false));
        CHECK(t.delta2_0.rational() == pair_sum(n, r, p, true));
        CHECK(delta_k_exact(n, r, p, 2).rational() == t.delta2.rational());
        CHECK(t.lambda.rational() == t.delta2.rational() - t.delta2_0.rational());
        CHECK(t.delta2_0 <= t.delta2);
        for (unsigned k = 0; k < r; ++k) {
          CHECK(t.nu0[k].rational() == rational_pow(p, pairs_in(k)) * t.nu[k].rational());
          if (k <= 1 || t.nu[k].is_zero()) {
            CHECK(t.nu0[k] == t.nu[k]);
          } else {
            CHECK(t.nu0[k] < t.nu[k]);
          }
        }
        CHECK(phi_brute_force(n, r, p) == phi_value(n, r, p));
      }
    }
  }
  CHECK(phi_value(5, 3, Rational(1, 2)).rational() == Rational(1, 4));
  CHECK_THROWS(phi_value(5, 2, Rational(1, 2)));
}

TEST_CASE("delta3 against direct triple enumeration") {
  const Rational p(1, 2);
  const auto sets = all_rsets(5, 3);
  Rational expected = 0;
  auto ov = [](VertexMask a, VertexMask b) { return popcount(a & b) >= 2; };
  for (std::size_t a = 0; a < sets.size(); ++a) {
    for (std::size_t b = a + 1; b < sets.size(); ++b) {
      for (std::size_t c = b + 1; c < sets.size(); ++c) {
        const int links = ov(sets[a], sets[b]) + ov(sets[a], sets[c]) + ov(sets[b], sets[c]);
        if (links < 2) continue;
        const VertexMask three[] = {sets[a], sets[b], sets[c]};
        expected += rational_pow(p, covered_pairs(three, 3));
      }
    }
  }
  CHECK(delta_k_exact(5, 3, p, 3).rational() == expected);
  CHECK(delta_k_exact(6, 3, p, 3, 3) == delta_k_exact(6, 3, p, 3, 1));
}

TEST_CASE("sigma quantities") {
  CHECK(sigma_nm(3, 3, 1).rational() == 1);
  CHECK(sigma_nm(6, 3, 20).rational() == 10);
  CHECK(matching_count_complete(6, 3) == 10);
  CHECK(matching_count_complete(9, 3) == 280);
  CHECK(sigma_npi(6, 3, ExactProb(Rational(1, 64))).rational() == Rational(5, 2048));
  CHECK(ratio_sigma(6, 3, 10).exact.rational() == Rational(19, 18));
  CHECK(ratio_sigma(5, 5, 1).exact.rational() == 1);
  CHECK(ratio_sigma(6, 3, 10).leading_approx == doctest::Approx(std::exp(36.0 / 180.0)));
  CHECK_THROWS(sigma_nm(7, 3, 1));
  CHECK_THROWS(sigma_nm(6, 3, 21));
  auto t = moment_table(6, 3, Rational(1, 2));
  REQUIRE(t.sigma_npi.has_value());
  CHECK(t.sigma_npi->rational() == Rational(5, 32));
}

TEST_CASE("moment table json") {
  auto j = to_json(moment_table(5, 3, Rational(1, 2)));
  CHECK(j["lambda"] == "15/32");
  CHECK(j["nu"]["2"] == "15/16");
  auto d = to_json(moment_table(10, 3, Rational(1, 10), true));
  CHECK(d["xi"] == "0.11");
  CHECK(d["p"] == "0.1");
  for (const auto& [key, value] : j.items()) CHECK((value.is_string() || value.is_object()));
}
