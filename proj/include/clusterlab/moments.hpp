#pragma once

// Closed-form moments of the K_r-count in G(n,p), plus enumeration of Δ_k.

#include <optional>
#include <vector>

#include <json.hpp>

#include "clusterlab/cluster_stats.hpp"
#include "clusterlab/exact_prob.hpp"

namespace clusterlab {

struct MomentTable {
  unsigned n = 0;
  unsigned r = 0;
  ExactProb p;
  bool decimal = false;  // render reals as decimals instead of num/den
  BigInt N;              // C(n, r)
  ExactProb pi;          // p^{C(r,2)}
  ExactProb mu_r;
  std::vector<ExactProb> nu;   // k = 0 .. r-1
  std::vector<ExactProb> nu0;  // p^{C(k,2)} nu[k]
  ExactProb delta2;
  ExactProb delta2_0;
  ExactProb lambda;        // from the pair sum directly
  ExactProb lambda_prime;  // its s = 2 term
  ExactProb phi;
  ExactProb xi;
  /// r = 3: the two summands n^5 p^7 and its square root; r = 4: n^3 p^6 and
  /// n^8 p^16.
  std::vector<ExactProb> xi_parts;
  ExactProb mu_next;  // μ_{r+1}
  double q_r = 0;
  double m_r = 0;
  double pi_r = 0;
  std::optional<ExactProb> sigma_npi;  // Σ(n, π) when r | n
};

/// Requires 3 <= r <= n <= 64 and 0 < p < 1.
MomentTable moment_table(unsigned n, unsigned r, const Rational& p, bool decimal = false);
nlohmann::ordered_json to_json(const MomentTable& table);

/// μ_k = C(n,k) p^{C(k,2)}.
ExactProb clique_mean(unsigned n, unsigned k, const Rational& p);

/// p^{r-1}.
ExactProb phi_value(unsigned n, unsigned r, const Rational& p);
/// max over ordered pairs i != j of p^{|E_i \ E_j|}.
ExactProb phi_brute_force(unsigned n, unsigned r, const Rational& p);

/// Overlap graph of all C(n, r) r-sets (lexicographic order).
std::vector<std::vector<std::uint32_t>> complete_overlap_graph(unsigned n, unsigned r);

/// Histogram of |R(S)| over connected k-subsets S of all r-sets.
PowerSum delta_k_terms(unsigned n, unsigned r, unsigned k, unsigned workers = 1);
/// Δ_k = E[W_k(I)], by enumeration. k ∈ {2, 3, 4}.
ExactProb delta_k_exact(unsigned n, unsigned r, const Rational& p, unsigned k, unsigned workers = 1);

/// n! / (r!^{n/r} (n/r)!): the number of perfect matchings of K_n^{(r)}.
BigInt matching_count_complete(unsigned n, unsigned r);
/// Σ(n, m) = matching_count · (m)_{n/r} / (N)_{n/r}.
ExactProb sigma_nm(unsigned n, unsigned r, const BigInt& m);
/// Σ(n, π) = matching_count · π^{n/r}.
ExactProb sigma_npi(unsigned n, unsigned r, const ExactProb& pi);

struct SigmaRatio {
  ExactProb exact;            // Σ(n, m/N) / Σ(n, m)
  double leading_approx = 0;  // exp(n^2 / (2 r^2 m))
};
SigmaRatio ratio_sigma(unsigned n, unsigned r, const BigInt& m);

}  // namespace clusterlab
