#include "clusterlab/cluster_stats.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "clusterlab/parallel.hpp"

namespace clusterlab {

namespace {

unsigned shared(VertexMask a, VertexMask b) { return popcount(a & b); }
bool overlap(VertexMask a, VertexMask b) { return shared(a, b) >= 2; }

void subsets_of_size(VertexMask pool, unsigned k, VertexMask acc,
                     const std::function<void(VertexMask)>& fn) {
  if (k == 0) {
    fn(acc);
    return;
  }
  while (popcount(pool) >= k) {
    const VertexMask low = pool & (~pool + 1);
    pool ^= low;
    subsets_of_size(pool, k - 1, acc | low, fn);
  }
}

std::vector<std::uint32_t> merge_unique(const std::vector<std::uint32_t>& a,
                                        const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool sorted_contains(const std::vector<std::uint32_t>& v, std::uint32_t x) {
  return std::binary_search(v.begin(), v.end(), x);
}

void esu_extend(const std::vector<std::vector<std::uint32_t>>& adj, unsigned k, std::uint32_t root,
                std::vector<std::uint32_t>& sub, std::vector<std::uint32_t> ext,
                const std::function<void(const std::vector<std::uint32_t>&)>& fn) {
  if (sub.size() == k) {
    fn(sub);
    return;
  }
  while (!ext.empty()) {
    const auto w = ext.back();
    ext.pop_back();
    auto next = ext;
    for (auto u : adj[w]) {
      if (u <= root || std::find(sub.begin(), sub.end(), u) != sub.end() || u == w) continue;
      bool exclusive = true;
      for (auto x : sub) {
        if (sorted_contains(adj[x], u)) {
          exclusive = false;
          break;
        }
      }
      if (exclusive && std::find(next.begin(), next.end(), u) == next.end()) next.push_back(u);
    }
    sub.push_back(w);
    esu_extend(adj, k, root, sub, std::move(next), fn);
    sub.pop_back();
  }
}

// Local bit index of each vertex pair inside a centre set.
struct CentreEdges {
  explicit CentreEdges(VertexMask centre) {
    unsigned local = 0;
    const auto verts = mask_to_tuple(centre);
    for (std::size_t a = 0; a < verts.size(); ++a) {
      for (std::size_t b = a + 1; b < verts.size(); ++b) {
        pairs.emplace_back(bit(verts[a]) | bit(verts[b]));
        ++local;
      }
    }
    full = local >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << local) - 1;
  }
  std::uint64_t covered_by(VertexMask leaf) const {
    std::uint64_t out = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if ((pairs[i] & leaf) == pairs[i]) out |= std::uint64_t{1} << i;
    }
    return out;
  }
  std::vector<VertexMask> pairs;
  std::uint64_t full = 0;
};

bool each_leaf_private(const std::vector<std::uint64_t>& cov) {
  for (std::size_t i = 0; i < cov.size(); ++i) {
    std::uint64_t others = 0;
    for (std::size_t j = 0; j < cov.size(); ++j) {
      if (j != i) others |= cov[j];
    }
    if ((cov[i] & ~others) == 0) return false;
  }
  return true;
}

bool leaves_legal(const std::vector<VertexMask>& leaves, unsigned n, unsigned r) {
  LabeledGraph g(n);
  for (auto e : leaves) {
    for (auto [u, v] : shadow_graph(RUniformHypergraph(n, r, {e})).edges()) g.add_edge(u, v);
  }
  return is_legal(clique_hypergraph(g, r));
}

}  // namespace

void PowerSum::add(unsigned exponent, std::uint64_t times) {
  if (counts.size() <= exponent) counts.resize(exponent + 1, 0);
  counts[exponent] += times;
}

PowerSum& PowerSum::operator+=(const PowerSum& other) {
  if (counts.size() < other.counts.size()) counts.resize(other.counts.size(), 0);
  for (std::size_t e = 0; e < other.counts.size(); ++e) counts[e] += other.counts[e];
  return *this;
}

std::uint64_t PowerSum::terms() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

Rational PowerSum::eval(const Rational& p) const {
  Rational out = 0;
  Rational power = 1;
  for (std::size_t e = 0; e < counts.size(); ++e) {
    if (counts[e]) out += Rational(static_cast<unsigned long>(counts[e])) * power;
    power *= p;
  }
  return out;
}

double PowerSum::eval(double p) const {
  double out = 0;
  for (std::size_t e = counts.size(); e-- > 0;) out = out * p + static_cast<double>(counts[e]);
  return out;
}

ExactProb PowerSum::eval(const ExactProb& p) const {
  if (p.is_exact()) return ExactProb(eval(p.rational()));
  ExactProb out;
  for (std::size_t e = 0; e < counts.size(); ++e) {
    if (counts[e]) out += ExactProb(static_cast<long>(counts[e])) * p.pow(static_cast<long>(e));
  }
  return out;
}

void for_each_overlapping_rset(VertexMask s, unsigned n, unsigned r,
                               const std::function<void(VertexMask, unsigned)>& fn) {
  const VertexMask all = n >= 64 ? ~VertexMask{0} : bit(n) - 1;
  const VertexMask outside = all & ~s;
  for (unsigned k = 2; k < r; ++k) {
    subsets_of_size(s, k, 0, [&](VertexMask inner) {
      subsets_of_size(outside, r - k, 0, [&](VertexMask outer) { fn(inner | outer, k); });
    });
  }
}

EdgeIndex::EdgeIndex(const RUniformHypergraph& h)
    : h_(&h), by_pair_(static_cast<std::size_t>(h.n()) * h.n()), shadow_(h.n(), 0) {
  for (std::uint32_t i = 0; i < h.size(); ++i) {
    const auto e = h.edge(i);
    for (VertexMask m = e; m; m &= m - 1) {
      const auto u = static_cast<unsigned>(std::countr_zero(m));
      shadow_[u] |= e & ~bit(u);
      for (VertexMask w = m & (m - 1); w; w &= w - 1) {
        const auto v = static_cast<unsigned>(std::countr_zero(w));
        by_pair_[u * h.n() + v].push_back(i);
      }
    }
  }
}

long EdgeIndex::find(VertexMask e) const {
  const auto& edges = h_->edges();
  auto it = std::lower_bound(edges.begin(), edges.end(), e, lex_less);
  return it != edges.end() && *it == e ? static_cast<long>(it - edges.begin()) : -1;
}

std::vector<std::uint32_t> EdgeIndex::neighbours(VertexMask s) const {
  std::vector<std::uint32_t> out;
  for (VertexMask m = s; m; m &= m - 1) {
    const auto u = static_cast<unsigned>(std::countr_zero(m));
    for (VertexMask w = m & (m - 1); w; w &= w - 1) {
      const auto v = static_cast<unsigned>(std::countr_zero(w));
      const auto& list = by_pair_[u * h_->n() + v];
      out.insert(out.end(), list.begin(), list.end());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  const long self = find(s);
  if (self >= 0) out.erase(std::remove(out.begin(), out.end(), static_cast<std::uint32_t>(self)), out.end());
  return out;
}

unsigned EdgeIndex::covered_inside(VertexMask s) const {
  unsigned twice = 0;
  for (VertexMask m = s; m; m &= m - 1) twice += popcount(shadow_[std::countr_zero(m)] & s);
  return twice / 2;
}

std::vector<std::vector<std::uint32_t>> overlap_graph(const std::vector<VertexMask>& sets) {
  std::vector<std::vector<std::uint32_t>> adj(sets.size());
  for (std::uint32_t i = 0; i < sets.size(); ++i) {
    for (std::uint32_t j = i + 1; j < sets.size(); ++j) {
      if (overlap(sets[i], sets[j])) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
    }
  }
  return adj;
}

void for_each_connected_subset(const std::vector<std::vector<std::uint32_t>>& adj, unsigned k,
                               std::size_t root_begin, std::size_t root_end,
                               const std::function<void(const std::vector<std::uint32_t>&)>& fn) {
  if (k == 0) return;
  std::vector<std::uint32_t> sub;
  for (auto v = static_cast<std::uint32_t>(root_begin); v < root_end; ++v) {
    std::vector<std::uint32_t> ext;
    for (auto u : adj[v]) {
      if (u > v) ext.push_back(u);
    }
    sub.assign(1, v);
    esu_extend(adj, k, v, sub, std::move(ext), fn);
  }
}

std::vector<std::vector<std::uint32_t>> clusters(const RUniformHypergraph& h) {
  const auto adj = overlap_graph(h.edges());
  std::vector<int> comp(h.size(), -1);
  std::vector<std::vector<std::uint32_t>> out;
  for (std::uint32_t s = 0; s < h.size(); ++s) {
    if (comp[s] >= 0) continue;
    std::vector<std::uint32_t> members{s};
    comp[s] = static_cast<int>(out.size());
    for (std::size_t head = 0; head < members.size(); ++head) {
      for (auto u : adj[members[head]]) {
        if (comp[u] < 0) {
          comp[u] = comp[s];
          members.push_back(u);
        }
      }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

std::uint64_t count_wk(const RUniformHypergraph& h, unsigned k) {
  if (k < 2) throw std::invalid_argument("count_wk needs k >= 2");
  check_guard(k <= 4, "count_wk: k = " + std::to_string(k) + " above 4");
  const auto adj = overlap_graph(h.edges());
  std::uint64_t count = 0;
  for_each_connected_subset(adj, k, 0, adj.size(), [&](const auto&) { ++count; });
  return count;
}

ClusterReport t_counts(const RUniformHypergraph& h, unsigned max_w) {
  ClusterReport rep;
  const unsigned r = h.r();
  rep.t_by_size.assign(r, 0);
  rep.t_isolated.assign(r, 0);
  const auto& e = h.edges();
  std::vector<unsigned> degree(e.size(), 0);
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      if (overlap(e[i], e[j])) {
        ++degree[i];
        ++degree[j];
      }
    }
  }
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      const unsigned s = shared(e[i], e[j]);
      ++rep.t_by_size[s];
      // Isolated: neither edge meets a third edge in two or more vertices.
      const unsigned own = s >= 2 ? 1 : 0;
      if (degree[i] == own && degree[j] == own) ++rep.t_isolated[s];
    }
  }
  rep.t_total = t_of(h);
  const auto adj = overlap_graph(e);
  for (unsigned k = 2; k <= max_w; ++k) {
    std::uint64_t count = 0;
    for_each_connected_subset(adj, k, 0, adj.size(), [&](const auto&) { ++count; });
    rep.w[k] = count;
  }
  return rep;
}

nlohmann::ordered_json to_json(const ClusterReport& report) {
  nlohmann::ordered_json j;
  for (const auto& [k, v] : report.w) j["W" + std::to_string(k)] = std::to_string(v);
  auto strings = [](const std::vector<std::uint64_t>& v) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (auto x : v) a.push_back(std::to_string(x));
    return a;
  };
  j["t_s"] = strings(report.t_by_size);
  j["t_iso_s"] = strings(report.t_isolated);
  j["t_total"] = std::to_string(report.t_total);
  return j;
}

PowerSum l2_terms(const RUniformHypergraph& h) {
  PowerSum out;
  const unsigned full = pairs_in(h.r());
  for (auto j : h.edges()) {
    for_each_overlapping_rset(j, h.n(), h.r(), [&](VertexMask, unsigned s) { out.add(full - pairs_in(s)); });
  }
  return out;
}

std::uint64_t q2(const RUniformHypergraph& h) {
  std::uint64_t count = 0;
  for (const auto& row : overlap_graph(h.edges())) count += row.size();
  return count / 2;
}

PowerSum q3_terms(const RUniformHypergraph& h, Q3Convention convention) {
  PowerSum out;
  const EdgeIndex index(h);
  const unsigned n = h.n();
  const unsigned r = h.r();
  const unsigned full = pairs_in(r);
  const bool ordered = convention == Q3Convention::kOrderedRoles;
  for (std::uint32_t a = 0; a < h.size(); ++a) {
    const VertexMask i = h.edge(a);
    const auto near_i = index.neighbours(i);
    // k ~ i: any Y-member j adjacent to i or to k completes a 3-cluster.
    for_each_overlapping_rset(i, n, r, [&](VertexMask k, unsigned s) {
      const long k_pos = index.find(k);
      std::uint64_t count = 0;
      for (auto b : merge_unique(near_i, index.neighbours(k))) {
        if (b == a || static_cast<long>(b) == k_pos) continue;
        if (ordered || b > a) ++count;
      }
      if (count) out.add(full - pairs_in(s), count);
    });
    // k !~ i: then j must be adjacent to both.
    for (auto b : near_i) {
      if (!ordered && b < a) continue;
      for_each_overlapping_rset(h.edge(b), n, r, [&](VertexMask k, unsigned) {
        if (!overlap(k, i)) out.add(full);
      });
    }
  }
  return out;
}

PowerSum q4_terms(const RUniformHypergraph& h) {
  PowerSum out;
  const EdgeIndex index(h);
  const unsigned n = h.n();
  const unsigned r = h.r();
  for (std::uint32_t a = 0; a < h.size(); ++a) {
    const VertexMask i = h.edge(a);
    for_each_overlapping_rset(i, n, r, [&](VertexMask i2, unsigned) {
      for_each_overlapping_rset(i2, n, r, [&](VertexMask j2, unsigned) {
        if (j2 == i || overlap(j2, i)) return;
        for (auto b : index.neighbours(j2)) {
          const VertexMask j = h.edge(b);
          if (b == a || overlap(j, i2)) continue;
          const VertexMask four[] = {i, j, i2, j2};
          const auto base = covered_pairs(four, 2);
          out.add(static_cast<unsigned>(covered_pairs(four, 4) - base));
        }
      });
    });
  }
  return out;
}

PowerSum complex_terms(const RUniformHypergraph& h) {
  if (!is_clique_realizable(h)) throw std::invalid_argument("complex sum needs a realizable hypergraph");
  PowerSum out;
  const EdgeIndex index(h);
  const unsigned full = pairs_in(h.r());
  for (std::uint32_t a = 0; a < h.size(); ++a) {
    for_each_overlapping_rset(h.edge(a), h.n(), h.r(), [&](VertexMask j, unsigned) {
      if (index.find(j) >= 0) return;
      const auto near = index.neighbours(j);
      // Count each complex j once, from its first Y-neighbour.
      if (near.size() >= 2 && near.front() == a) out.add(full - index.covered_inside(j));
    });
  }
  return out;
}

void for_each_star_cluster(const RUniformHypergraph& h, const StarOptions& options,
                           const std::function<void(const StarCluster&)>& fn) {
  const unsigned n = h.n();
  const unsigned r = h.r();
  check_guard(pairs_in(r) <= 64, "star clusters need C(r,2) <= 64");
  const EdgeIndex index(h);
  const auto centres = choose_u64(n, r);
  for (std::uint64_t c = 0; c < centres; ++c) {
    const VertexMask centre = unrank_rset(c, n, r);
    const auto cand = index.neighbours(centre);
    if (cand.size() < 2) continue;
    check_guard(cand.size() <= options.max_candidates,
                "star clusters: " + std::to_string(cand.size()) + " leaf candidates for one centre");
    const CentreEdges local(centre);
    std::vector<std::uint64_t> cover;
    for (auto b : cand) cover.push_back(local.covered_by(h.edge(b)));

    std::vector<std::size_t> chosen;
    std::vector<std::uint64_t> chosen_cov;
    auto emit = [&](std::uint64_t union_cov) {
      StarCluster s;
      s.center = centre;
      for (auto x : chosen) s.leaves.push_back(h.edge(cand[x]));
      if (options.legal_only && !leaves_legal(s.leaves, n, r)) return;
      s.uncovered = popcount(local.full & ~union_cov);
      s.leaf_union = static_cast<unsigned>(covered_pairs(s.leaves));
      fn(s);
    };
    // Depth-first over leaf sets. Beyond two leaves, "every leaf has a
    // private edge" is inherited by subsets, so failing sets are not extended.
    std::function<void(std::size_t, std::uint64_t)> grow = [&](std::size_t from, std::uint64_t union_cov) {
      for (std::size_t x = from; x < cand.size(); ++x) {
        const std::uint64_t next = union_cov | cover[x];
        if (next == local.full) continue;
        chosen.push_back(x);
        chosen_cov.push_back(cover[x]);
        const bool minimal = each_leaf_private(chosen_cov);
        if (chosen.size() == 2 || (chosen.size() > 2 && minimal)) emit(next);
        if (minimal) grow(x + 1, next);
        chosen.pop_back();
        chosen_cov.pop_back();
      }
    };
    grow(0, 0);
  }
}

std::vector<StarCluster> star_clusters(const RUniformHypergraph& h, const StarOptions& options) {
  std::vector<StarCluster> out;
  for_each_star_cluster(h, options, [&](const StarCluster& s) { out.push_back(s); });
  return out;
}

PowerSum c_hat_terms(const RUniformHypergraph& h, const StarOptions& options) {
  PowerSum out;
  for_each_star_cluster(h, options, [&](const StarCluster& s) { out.add(s.uncovered); });
  return out;
}

PowerSum c_hat_legal_terms(const RUniformHypergraph& h, StarOptions options) {
  options.legal_only = true;
  return c_hat_terms(h, options);
}

bool is_legal_cluster(const std::vector<VertexMask>& cluster, unsigned r) {
  VertexMask all = 0;
  for (auto s : cluster) all |= s;
  if (popcount(all) <= r + 1) return true;
  if (cluster.size() == 2) return shared(cluster[0], cluster[1]) == 2;
  if (cluster.size() == 3) {
    for (int c = 0; c < 3; ++c) {
      const VertexMask s1 = cluster[c];
      const VertexMask s2 = cluster[(c + 1) % 3];
      const VertexMask s3 = cluster[(c + 2) % 3];
      if (shared(s1, s2) == 2 && shared(s1, s3) == 2 && ((s2 & s3) & ~s1) == 0) return true;
    }
  }
  return false;
}

bool is_legal(const RUniformHypergraph& h) {
  for (const auto& comp : clusters(h)) {
    std::vector<VertexMask> sets;
    for (auto i : comp) sets.push_back(h.edge(i));
    if (!is_legal_cluster(sets, h.r())) return false;
  }
  return true;
}

}  // namespace clusterlab
