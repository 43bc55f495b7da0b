#pragma once

// Configuration statistics of an r-uniform hypergraph H viewed as an outcome
// Y(H) of the clique family: clusters, W_k, t_s, L_2, Q_2..Q_4, the complex
// sum C, star-clusters and legality.
//
// Two r-sets overlap (i ~ j) when they share at least two vertices, i.e. at
// least one graph edge. Every probability-weighted sum here is a sum of
// powers of p, so it is returned as a PowerSum (exponent histogram) and can
// be evaluated exactly or in floating point.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "clusterlab/clique_family.hpp"
#include "clusterlab/exact_prob.hpp"

namespace clusterlab {

/// Σ_e counts[e] · p^e.
struct PowerSum {
  std::vector<std::uint64_t> counts;

  void add(unsigned exponent, std::uint64_t times = 1);
  PowerSum& operator+=(const PowerSum& other);
  std::uint64_t terms() const;
  Rational eval(const Rational& p) const;
  double eval(double p) const;
  ExactProb eval(const ExactProb& p) const;
  friend bool operator==(const PowerSum&, const PowerSum&) = default;
};

inline unsigned pairs_in(unsigned k) { return k * (k - 1) / 2; }

/// Calls fn(T, s) for every r-subset T of [n] with 2 <= s = |S ∩ T| < r.
void for_each_overlapping_rset(VertexMask s, unsigned n, unsigned r,
                               const std::function<void(VertexMask, unsigned)>& fn);

/// Lookup of H's edges by the vertex pairs they contain.
class EdgeIndex {
 public:
  explicit EdgeIndex(const RUniformHypergraph& h);
  const RUniformHypergraph& hypergraph() const { return *h_; }
  /// Position of `e` in h.edges(), or -1.
  long find(VertexMask e) const;
  /// Positions of edges of H (other than s itself) sharing >= 2 vertices
  /// with s, ascending.
  std::vector<std::uint32_t> neighbours(VertexMask s) const;
  /// Shadow-graph rows of H.
  VertexMask shadow_row(unsigned v) const { return shadow_[v]; }
  /// Graph edges inside s already covered by H's shadow.
  unsigned covered_inside(VertexMask s) const;

 private:
  const RUniformHypergraph* h_;
  std::vector<std::vector<std::uint32_t>> by_pair_;
  std::vector<VertexMask> shadow_;
};

/// Adjacency lists of the overlap graph on h.edges().
std::vector<std::vector<std::uint32_t>> overlap_graph(const std::vector<VertexMask>& sets);

/// Connected k-subsets of an undirected graph (ESU enumeration). Calls
/// fn(subset) with node ids; `roots` restricts the smallest node to [begin, end).
void for_each_connected_subset(const std::vector<std::vector<std::uint32_t>>& adj, unsigned k,
                               std::size_t root_begin, std::size_t root_end,
                               const std::function<void(const std::vector<std::uint32_t>&)>& fn);

/// Components of the overlap graph, each as ascending edge positions.
std::vector<std::vector<std::uint32_t>> clusters(const RUniformHypergraph& h);

/// Number of connected k-subsets of edges. Guarded at k <= 4.
std::uint64_t count_wk(const RUniformHypergraph& h, unsigned k);

struct ClusterReport {
  std::map<unsigned, std::uint64_t> w;     // k -> W_k for k = 2, 3, 4
  std::vector<std::uint64_t> t_by_size;    // s -> t_s, 0 <= s <= r-1
  std::vector<std::uint64_t> t_isolated;   // s -> t_s^-
  std::uint64_t t_total = 0;
};

/// `max_w` bounds the cluster sizes counted (2..max_w).
ClusterReport t_counts(const RUniformHypergraph& h, unsigned max_w = 4);
nlohmann::ordered_json to_json(const ClusterReport& report);

/// L_2 = Σ_{j∈Y} Σ_{i~j} p^{|E_i \ E_j|}, summed over all r-sets i.
PowerSum l2_terms(const RUniformHypergraph& h);
std::uint64_t q2(const RUniformHypergraph& h);

enum class Q3Convention {
  /// Ordered (i, j) with i, j ∈ Y, any k, weight Pr(A_k | A_i).
  kOrderedRoles,
  /// Each unordered Y-pair once, conditioned on its lexicographically
  /// smaller member.
  kUnorderedPair,
};
PowerSum q3_terms(const RUniformHypergraph& h, Q3Convention convention = Q3Convention::kOrderedRoles);
/// 4-tuples (i, i', j', j) of distinct r-sets, i ~ i' ~ j' ~ j, i' !~ j,
/// i !~ j', i, j ∈ Y; weight Pr(A_i' ∩ A_j' | A_i ∩ A_j).
PowerSum q4_terms(const RUniformHypergraph& h);

/// C(Y): complex j ∉ Y weighted p^{|E_j \ R(Y)|}. Throws std::invalid_argument
/// if H is not realizable.
PowerSum complex_terms(const RUniformHypergraph& h);

struct StarCluster {
  VertexMask center;
  std::vector<VertexMask> leaves;  // lexicographic order
  unsigned uncovered = 0;          // |E_j \ R(T)|
  unsigned leaf_union = 0;         // |R(T)|
};

struct StarOptions {
  std::uint32_t max_candidates = 24;  // Y-members overlapping one centre
  bool legal_only = false;
};

/// Star-clusters (j, T) with T ⊆ Y(H). Every leaf shares an edge with the
/// centre; when |T| >= 3 each leaf covers an edge of E_j that no other leaf
/// covers. Centres range over all r-sets of [n].
void for_each_star_cluster(const RUniformHypergraph& h, const StarOptions& options,
                           const std::function<void(const StarCluster&)>& fn);
std::vector<StarCluster> star_clusters(const RUniformHypergraph& h, const StarOptions& options = {});
/// Ĉ: π_c summed over pre-present star-clusters.
PowerSum c_hat_terms(const RUniformHypergraph& h, const StarOptions& options = {});
/// Ĉ_L: the same sum over legal star-clusters.
PowerSum c_hat_legal_terms(const RUniformHypergraph& h, StarOptions options = {});

/// Legality of a single cluster given as vertex sets.
bool is_legal_cluster(const std::vector<VertexMask>& cluster, unsigned r);
/// Every cluster of H is legal.
bool is_legal(const RUniformHypergraph& h);

}  // namespace clusterlab
