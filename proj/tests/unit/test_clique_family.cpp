#include <doctest.h>

#include <cmath>
#include <sstream>

#include "clusterlab/clique_family.hpp"

using namespace clusterlab;

namespace {

RUniformHypergraph hyper(unsigned n, unsigned r, std::vector<std::vector<std::uint32_t>> t) {
  return RUniformHypergraph::from_tuples(n, r, t);
}

LabeledGraph cycle(unsigned n) {
  LabeledGraph g(n);
  for (unsigned v = 0; v < n; ++v) g.add_edge(v, (v + 1) % n);
  return g;
}

}  // namespace

TEST_CASE("lexicographic ranks of r-sets") {
  unsigned expected = 0;
  for (unsigned a = 0; a < 6; ++a) {
    for (unsigned b = a + 1; b < 6; ++b) {
      for (unsigned c = b + 1; c < 6; ++c) {
        const auto m = bit(a) | bit(b) | bit(c);
        CHECK(rank_rset(m, 6, 3) == expected);
        CHECK(unrank_rset(expected, 6, 3) == m);
        ++expected;
      }
    }
  }
  unsigned k = 0;
  for (unsigned u = 0; u < 7; ++u) {
    for (unsigned v = u + 1; v < 7; ++v) CHECK(pair_index(u, v, 7) == k++);
  }
  CHECK(lex_less(bit(0) | bit(3), bit(1) | bit(2)));
  CHECK_FALSE(lex_less(bit(1) | bit(2), bit(0) | bit(3)));
}

TEST_CASE("sampling extremes and edge-count mean") {
  RngStream rng(1, 0);
  CHECK(sample_gnp(10, Rational(0), rng).edge_count() == 0);
  CHECK(sample_gnp(10, Rational(1), rng) == LabeledGraph::complete(10));

  const auto t = bernoulli_threshold(Rational(1, 10));
  const int samples = 10000;
  double sum = 0;
  for (int s = 0; s < samples; ++s) {
    RngStream stream(99, static_cast<std::uint64_t>(s));
    sum += static_cast<double>(sample_gnp(50, t, stream).edge_count());
  }
  const double mean = sum / samples;
  const double se = std::sqrt(1225 * 0.1 * 0.9 / samples);
  CHECK(std::abs(mean - 122.5) < 4 * se);

  RngStream a(5, 3);
  RngStream b(5, 3);
  CHECK(sample_gnp(20, t, a) == sample_gnp(20, t, b));
}

TEST_CASE("clique hypergraphs") {
  CHECK(clique_hypergraph(LabeledGraph::complete(6), 3).size() == 20);
  CHECK(clique_hypergraph(LabeledGraph(6), 3).empty());
  CHECK(clique_hypergraph(cycle(5), 3).empty());
  auto h = clique_hypergraph(LabeledGraph::complete(5), 4);
  CHECK(h.size() == 5);
  CHECK(h.edge(0) == (bit(0) | bit(1) | bit(2) | bit(3)));
  CHECK_THROWS(clique_hypergraph(LabeledGraph(3), 4));
}

TEST_CASE("outcome round trip") {
  auto f = clique_event_family(4, 3);
  auto h = hyper(4, 3, {{0, 1, 2}});
  CHECK(outcome_of(f, h).indices() == IndexSet{0});
  CHECK(outcome_of(f, hyper(4, 3, {})).indices().empty());
  auto f6 = clique_event_family(6, 3);
  auto h6 = hyper(6, 3, {{0, 2, 5}, {1, 2, 3}, {3, 4, 5}});
  CHECK(hypergraph_of(outcome_of(f6, h6), 6, 3) == h6);
}

TEST_CASE("shadow graph and repeated pairs") {
  CHECK(shadow_graph(hyper(5, 3, {})).edge_count() == 0);
  CHECK(shadow_graph(hyper(5, 3, {{1, 2, 3}})).edge_count() == 3);
  CHECK(shadow_graph(hyper(5, 3, {{1, 2, 3}, {1, 2, 4}})).edge_count() == 5);
  CHECK(t_of(hyper(5, 3, {})) == 0);
  CHECK(t_of(hyper(5, 3, {{1, 2, 3}, {1, 2, 4}})) == 1);
  CHECK(t_of(hyper(6, 3, {{1, 2, 3}, {1, 2, 4}, {1, 2, 5}})) == 2);
}

TEST_CASE("t(H) equals the repeated ground elements of Y(H)") {
  auto f = clique_event_family(7, 3);
  RngStream rng(11, 0);
  for (int trial = 0; trial < 50; ++trial) {
    auto h = clique_hypergraph(sample_gnp(7, Rational(1, 2), rng), 3);
    Outcome y = outcome_of(f, h);
    CHECK(t_of(h) == 3 * y.indices().size() - revealed_set(f, y).size());
  }
}

TEST_CASE("realizability") {
  CHECK(is_clique_realizable(hyper(4, 3, {})));
  CHECK_FALSE(is_clique_realizable(hyper(4, 3, {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}})));
  CHECK(is_clique_realizable(hyper(6, 3, {{0, 1, 2}, {3, 4, 5}})));
  RngStream rng(3, 0);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = sample_gnp(8, Rational(1, 2), rng);
    auto h = clique_hypergraph(g, 3);
    CHECK(is_clique_realizable(h));
  }
}

TEST_CASE("text format round trip") {
  auto h = hyper(6, 3, {{0, 1, 2}, {1, 2, 3}});
  std::ostringstream out;
  write_hypergraph(out, h);
  CHECK(out.str() == "6 3\n0 1 2\n1 2 3\n");
  std::istringstream in("# comment\n6 3\n1 2 3\n\n0 1 2\n");
  CHECK(read_hypergraph(in) == h);

  LabeledGraph g(4);
  g.add_edge(0, 3);
  g.add_edge(1, 2);
  std::ostringstream gout;
  write_graph(gout, g);
  std::istringstream gin(gout.str());
  CHECK(read_graph(gin) == g);
  std::istringstream bad("4 3\n0 1\n");
  CHECK_THROWS(read_hypergraph(bad));
  CHECK_THROWS(LabeledGraph(65));
}
