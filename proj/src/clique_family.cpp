#include "clusterlab/clique_family.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace clusterlab {

namespace {

void check_vertex_count(unsigned n) {
  if (n > kMaxVertices) {
    throw std::invalid_argument("n = " + std::to_string(n) + " exceeds the 64-vertex bitset capacity");
  }
}

VertexMask all_below(unsigned n) { return n >= 64 ? ~VertexMask{0} : bit(n) - 1; }

void cliques_from(const LabeledGraph& g, unsigned need, VertexMask chosen, VertexMask candidates,
                  std::vector<VertexMask>& out) {
  if (need == 0) {
    out.push_back(chosen);
    return;
  }
  while (popcount(candidates) >= need) {
    const unsigned v = static_cast<unsigned>(std::countr_zero(candidates));
    candidates &= candidates - 1;
    cliques_from(g, need - 1, chosen | bit(v), candidates & g.row(v), out);
  }
}

std::string next_content_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return line;
  }
  return {};
}

std::pair<unsigned, unsigned> read_header(std::istream& in) {
  std::istringstream header(next_content_line(in));
  long n = -1;
  long r = -1;
  std::string extra;
  if (!(header >> n >> r) || (header >> extra) || n < 0 || r < 0) {
    throw std::invalid_argument("expected header line \"n r\"");
  }
  return {static_cast<unsigned>(n), static_cast<unsigned>(r)};
}

std::vector<std::vector<std::uint32_t>> read_rows(std::istream& in) {
  std::vector<std::vector<std::uint32_t>> rows;
  for (std::string line = next_content_line(in); !line.empty(); line = next_content_line(in)) {
    std::istringstream ls(line);
    std::vector<std::uint32_t> row;
    long v = 0;
    while (ls >> v) {
      if (v < 0) throw std::invalid_argument("negative vertex index");
      row.push_back(static_cast<std::uint32_t>(v));
    }
    if (!ls.eof()) throw std::invalid_argument("malformed edge line: " + line);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<std::uint32_t> mask_to_tuple(VertexMask m) {
  std::vector<std::uint32_t> out;
  for (; m; m &= m - 1) out.push_back(static_cast<std::uint32_t>(std::countr_zero(m)));
  return out;
}

VertexMask tuple_to_mask(const std::vector<std::uint32_t>& tuple, unsigned n) {
  VertexMask m = 0;
  for (auto v : tuple) {
    if (v >= n) throw std::out_of_range("vertex " + std::to_string(v) + " >= n");
    if (m & bit(v)) throw std::invalid_argument("repeated vertex in edge");
    m |= bit(v);
  }
  return m;
}

LabeledGraph::LabeledGraph(unsigned n) : n_(n), rows_(n, 0) { check_vertex_count(n); }

void LabeledGraph::add_edge(unsigned u, unsigned v) {
  if (u >= n_ || v >= n_ || u == v) throw std::invalid_argument("bad graph edge");
  rows_[u] |= bit(v);
  rows_[v] |= bit(u);
}

void LabeledGraph::remove_edge(unsigned u, unsigned v) {
  rows_[u] &= ~bit(v);
  rows_[v] &= ~bit(u);
}

void LabeledGraph::toggle_edge(unsigned u, unsigned v) {
  rows_[u] ^= bit(v);
  rows_[v] ^= bit(u);
}

std::size_t LabeledGraph::edge_count() const {
  std::size_t twice = 0;
  for (auto row : rows_) twice += popcount(row);
  return twice / 2;
}

std::vector<std::pair<unsigned, unsigned>> LabeledGraph::edges() const {
  std::vector<std::pair<unsigned, unsigned>> out;
  for (unsigned u = 0; u < n_; ++u) {
    for (VertexMask m = rows_[u] & ~all_below(u + 1); m; m &= m - 1) {
      out.emplace_back(u, static_cast<unsigned>(std::countr_zero(m)));
    }
  }
  return out;
}

LabeledGraph LabeledGraph::complete(unsigned n) {
  LabeledGraph g(n);
  for (unsigned v = 0; v < n; ++v) g.rows_[v] = all_below(n) & ~bit(v);
  return g;
}

RUniformHypergraph::RUniformHypergraph(unsigned n, unsigned r, std::vector<VertexMask> edges)
    : n_(n), r_(r), edges_(std::move(edges)) {
  check_vertex_count(n);
  if (r > n && !edges_.empty()) throw std::invalid_argument("r > n");
  for (auto e : edges_) {
    if (popcount(e) != r || (e & ~all_below(n)) != 0) {
      throw std::invalid_argument("hyperedge is not an r-subset of [n]");
    }
  }
  std::sort(edges_.begin(), edges_.end(), lex_less);
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw std::invalid_argument("duplicate hyperedge");
  }
}

RUniformHypergraph RUniformHypergraph::from_tuples(
    unsigned n, unsigned r, const std::vector<std::vector<std::uint32_t>>& tuples) {
  std::vector<VertexMask> edges;
  edges.reserve(tuples.size());
  for (const auto& t : tuples) {
    if (t.size() != r) throw std::invalid_argument("hyperedge does not have r vertices");
    edges.push_back(tuple_to_mask(t, n));
  }
  return RUniformHypergraph(n, r, std::move(edges));
}

bool RUniformHypergraph::contains(VertexMask e) const {
  return std::binary_search(edges_.begin(), edges_.end(), e, lex_less);
}

std::vector<std::vector<std::uint32_t>> RUniformHypergraph::tuples() const {
  std::vector<std::vector<std::uint32_t>> out;
  out.reserve(edges_.size());
  for (auto e : edges_) out.push_back(mask_to_tuple(e));
  return out;
}

std::uint64_t rank_rset(VertexMask set, unsigned n, unsigned r) {
  std::uint64_t rank = 0;
  unsigned next = 0;  // smallest vertex still available
  unsigned left = r;
  for (VertexMask m = set; m; m &= m - 1) {
    const auto v = static_cast<unsigned>(std::countr_zero(m));
    for (unsigned u = next; u < v; ++u) rank += choose_u64(n - 1 - u, left - 1);
    next = v + 1;
    --left;
  }
  return rank;
}

VertexMask unrank_rset(std::uint64_t rank, unsigned n, unsigned r) {
  if (rank >= choose_u64(n, r)) throw std::out_of_range("r-set rank out of range");
  VertexMask out = 0;
  unsigned v = 0;
  for (unsigned left = r; left > 0; --left) {
    for (;; ++v) {
      const auto block = choose_u64(n - 1 - v, left - 1);
      if (rank < block) break;
      rank -= block;
    }
    out |= bit(v++);
  }
  return out;
}

unsigned pair_index(unsigned u, unsigned v, unsigned n) {
  if (u > v) std::swap(u, v);
  // Pairs starting below u, then the offset within u's row.
  return u * n - u * (u + 1) / 2 + (v - u - 1);
}

LabeledGraph sample_gnp(unsigned n, const BernoulliThreshold& p, RngStream& rng) {
  LabeledGraph g(n);
  for (unsigned u = 0; u < n; ++u) {
    for (unsigned v = u + 1; v < n; ++v) {
      if (rng.bernoulli(p)) g.add_edge(u, v);
    }
  }
  return g;
}

LabeledGraph sample_gnp(unsigned n, const Rational& p, RngStream& rng) {
  return sample_gnp(n, bernoulli_threshold(p), rng);
}

RUniformHypergraph clique_hypergraph(const LabeledGraph& g, unsigned r) {
  if (r < 2 || r > g.n()) throw std::invalid_argument("clique_hypergraph needs 2 <= r <= n");
  std::vector<VertexMask> out;
  cliques_from(g, r, 0, all_below(g.n()), out);
  return RUniformHypergraph(g.n(), r, std::move(out));
}

LabeledGraph shadow_graph(const RUniformHypergraph& h) {
  LabeledGraph g(h.n());
  for (auto e : h.edges()) {
    for (VertexMask m = e; m; m &= m - 1) {
      const auto v = static_cast<unsigned>(std::countr_zero(m));
      for (VertexMask w = e & ~bit(v) & ~all_below(v); w; w &= w - 1) {
        g.add_edge(v, static_cast<unsigned>(std::countr_zero(w)));
      }
    }
  }
  return g;
}

std::size_t covered_pairs(const VertexMask* sets, std::size_t count) {
  VertexMask rows[kMaxVertices] = {};
  VertexMask touched = 0;
  for (std::size_t i = 0; i < count; ++i) {
    for (VertexMask m = sets[i]; m; m &= m - 1) {
      const auto v = std::countr_zero(m);
      rows[v] |= sets[i] & ~bit(static_cast<unsigned>(v));
    }
    touched |= sets[i];
  }
  std::size_t twice = 0;
  for (VertexMask m = touched; m; m &= m - 1) twice += popcount(rows[std::countr_zero(m)]);
  return twice / 2;
}

std::uint64_t t_of(const RUniformHypergraph& h) {
  const std::uint64_t per_edge = std::uint64_t{h.r()} * (h.r() - 1) / 2;
  return per_edge * h.size() - covered_pairs(h.edges());
}

bool is_clique_realizable(const RUniformHypergraph& h) {
  if (h.empty()) return true;
  return clique_hypergraph(shadow_graph(h), h.r()) == h;
}

EventFamily clique_event_family(unsigned n, unsigned r) {
  check_vertex_count(n);
  if (r < 2 || r > n) throw std::invalid_argument("clique family needs 2 <= r <= n");
  const auto count = choose_u64(n, r);
  std::vector<IndexSet> members;
  members.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto tuple = mask_to_tuple(unrank_rset(i, n, r));
    IndexSet pairs;
    for (std::size_t a = 0; a < tuple.size(); ++a) {
      for (std::size_t b = a + 1; b < tuple.size(); ++b) pairs.push_back(pair_index(tuple[a], tuple[b], n));
    }
    members.push_back(std::move(pairs));
  }
  return EventFamily(n * (n - 1) / 2, r * (r - 1) / 2, std::move(members));
}

Outcome outcome_of(const EventFamily& family, const RUniformHypergraph& h) {
  if (family.size() != choose_u64(h.n(), h.r())) {
    throw std::invalid_argument("hypergraph does not match the clique family");
  }
  IndexSet indices;
  indices.reserve(h.size());
  for (auto e : h.edges()) indices.push_back(static_cast<std::uint32_t>(rank_rset(e, h.n(), h.r())));
  return Outcome(family, std::move(indices));
}

RUniformHypergraph hypergraph_of(const Outcome& y, unsigned n, unsigned r) {
  std::vector<VertexMask> edges;
  edges.reserve(y.indices().size());
  for (auto i : y.indices()) edges.push_back(unrank_rset(i, n, r));
  return RUniformHypergraph(n, r, std::move(edges));
}

LabeledGraph read_graph(std::istream& in) {
  const auto [n, r] = read_header(in);
  if (r != 0) throw std::invalid_argument("graph header must have r = 0");
  LabeledGraph g(n);
  for (const auto& row : read_rows(in)) {
    if (row.size() != 2 || row[0] >= n || row[1] >= n || row[0] == row[1]) {
      throw std::invalid_argument("graph edge lines need two distinct vertices below n");
    }
    g.add_edge(row[0], row[1]);
  }
  return g;
}

RUniformHypergraph read_hypergraph(std::istream& in) {
  const auto [n, r] = read_header(in);
  if (r == 0) throw std::invalid_argument("hypergraph header needs r >= 1");
  return RUniformHypergraph::from_tuples(n, r, read_rows(in));
}

void write_graph(std::ostream& out, const LabeledGraph& g) {
  out << g.n() << " 0\n";
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

void write_hypergraph(std::ostream& out, const RUniformHypergraph& h) {
  out << h.n() << ' ' << h.r() << '\n';
  for (auto e : h.edges()) {
    const char* sep = "";
    for (auto v : mask_to_tuple(e)) {
      out << sep << v;
      sep = " ";
    }
    out << '\n';
  }
}

}  // namespace clusterlab
