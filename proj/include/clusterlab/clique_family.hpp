#pragma once

// Graphs on at most 64 labeled vertices, r-uniform hypergraphs, and the
// clique instantiation of the event framework.

#include <bit>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "clusterlab/event_core.hpp"
#include "clusterlab/rng.hpp"

namespace clusterlab {

inline constexpr unsigned kMaxVertices = 64;

using VertexMask = std::uint64_t;

inline VertexMask bit(unsigned v) { return VertexMask{1} << v; }
inline unsigned popcount(std::uint64_t x) { return static_cast<unsigned>(std::popcount(x)); }
/// Lexicographic order of equal-size vertex sets viewed as sorted tuples.
inline bool lex_less(VertexMask a, VertexMask b) {
  const VertexMask diff = a ^ b;
  return diff != 0 && (a & diff & (~diff + 1)) != 0;
}
std::vector<std::uint32_t> mask_to_tuple(VertexMask m);
VertexMask tuple_to_mask(const std::vector<std::uint32_t>& tuple, unsigned n);

class LabeledGraph {
 public:
  explicit LabeledGraph(unsigned n);

  unsigned n() const { return n_; }
  VertexMask row(unsigned v) const { return rows_[v]; }
  bool has_edge(unsigned u, unsigned v) const { return (rows_[u] >> v) & 1u; }
  void add_edge(unsigned u, unsigned v);
  void remove_edge(unsigned u, unsigned v);
  void toggle_edge(unsigned u, unsigned v);
  std::size_t edge_count() const;
  /// Pairs (u, v) with u < v in lexicographic order.
  std::vector<std::pair<unsigned, unsigned>> edges() const;

  static LabeledGraph complete(unsigned n);
  friend bool operator==(const LabeledGraph&, const LabeledGraph&) = default;

 private:
  unsigned n_;
  std::vector<VertexMask> rows_;
};

class RUniformHypergraph {
 public:
  /// Edges are vertex masks of exactly r vertices below n; they are sorted
  /// lexicographically. Throws std::invalid_argument on duplicates or bad sets.
  RUniformHypergraph(unsigned n, unsigned r, std::vector<VertexMask> edges = {});
  static RUniformHypergraph from_tuples(unsigned n, unsigned r,
                                        const std::vector<std::vector<std::uint32_t>>& tuples);

  unsigned n() const { return n_; }
  unsigned r() const { return r_; }
  std::size_t size() const { return edges_.size(); }  // e(H)
  bool empty() const { return edges_.empty(); }
  const std::vector<VertexMask>& edges() const { return edges_; }
  VertexMask edge(std::size_t i) const { return edges_[i]; }
  bool contains(VertexMask e) const;
  std::vector<std::vector<std::uint32_t>> tuples() const;

  friend bool operator==(const RUniformHypergraph&, const RUniformHypergraph&) = default;

 private:
  unsigned n_;
  unsigned r_;
  std::vector<VertexMask> edges_;
};

/// Lexicographic rank of an r-subset of [n] among all C(n, r) of them.
std::uint64_t rank_rset(VertexMask set, unsigned n, unsigned r);
VertexMask unrank_rset(std::uint64_t rank, unsigned n, unsigned r);
/// Index of the pair {u, v} among the C(n, 2) pairs in lexicographic order.
unsigned pair_index(unsigned u, unsigned v, unsigned n);

LabeledGraph sample_gnp(unsigned n, const BernoulliThreshold& p, RngStream& rng);
LabeledGraph sample_gnp(unsigned n, const Rational& p, RngStream& rng);

/// All r-cliques of G, in lexicographic order.
RUniformHypergraph clique_hypergraph(const LabeledGraph& g, unsigned r);

LabeledGraph shadow_graph(const RUniformHypergraph& h);
/// Edge count of the shadow of the given vertex sets.
std::size_t covered_pairs(const VertexMask* sets, std::size_t count);
inline std::size_t covered_pairs(const std::vector<VertexMask>& sets) {
  return covered_pairs(sets.data(), sets.size());
}

/// C(r,2) e(H) - e(G(H)).
std::uint64_t t_of(const RUniformHypergraph& h);
bool is_clique_realizable(const RUniformHypergraph& h);

/// Ground set: the C(n,2) pairs; members: edge sets of the r-subsets, in the
/// lexicographic order used by rank_rset().
EventFamily clique_event_family(unsigned n, unsigned r);
Outcome outcome_of(const EventFamily& family, const RUniformHypergraph& h);
RUniformHypergraph hypergraph_of(const Outcome& y, unsigned n, unsigned r);

/// Text format: first line "n r" (r = 0 for graphs), then one edge per line.
LabeledGraph read_graph(std::istream& in);
RUniformHypergraph read_hypergraph(std::istream& in);
void write_graph(std::ostream& out, const LabeledGraph& g);
void write_hypergraph(std::ostream& out, const RUniformHypergraph& h);

}  // namespace clusterlab
