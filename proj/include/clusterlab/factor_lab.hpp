#pragma once

// K_r-factors of graphs, perfect matchings of r-uniform hypergraphs, the
// identity E[F_r] = Σ(n, π), the factor ratio diagnostic and the random
// edge-deletion (Shamir) process on the complete r-uniform hypergraph.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "clusterlab/distribution_lab.hpp"

namespace clusterlab {

/// Number of K_r-factors of G. Requires r | n; guarded at n <= 30.
BigInt count_factors(const LabeledGraph& g, unsigned r);

/// Number of perfect matchings of H. Requires r | n; guarded at n <= 30.
BigInt count_matchings(const RUniformHypergraph& h);
/// Perfect matchings of H that use the edge f (f must be an edge of H).
BigInt count_matchings_containing(const RUniformHypergraph& h, VertexMask f);

/// Σ_G F_r(G) Pr(G) over all labeled graphs on [n]. Requires r | n and
/// C(n,2) <= 21.
ExactProb expected_factors_exact(unsigned n, unsigned r, const Rational& p, unsigned workers = 1);

struct FactorRatio {
  unsigned n = 0;
  unsigned r = 0;
  std::uint64_t m = 0;
  ExactProb binomial_prob;   // Pr(Bin(N, π) = m)
  ExactProb lhs;             // E[F_r 1{W_m}] / Pr(Bin(N, π) = m)
  ExactProb lhs_any;         // the same without the well-behaved condition
  double rhs = 0;            // F_r(K_n) (m)_k/(N)_k exp(-C(k,2)/C(m,2) (Δ2 - Δ2⁰))
  double log_ratio = 0;      // log(lhs / rhs); -inf when lhs = 0
};

/// W_m = {H_r(G(n,p)) is well behaved and e(H) = m}. Diagnostic only.
/// Requires |m - μ_r| <= ω √μ_r, n/r <= m <= N and the exact-distribution
/// guard; cfg must carry E[Q_i], E[C] and Δ3 for (n, r, p).
FactorRatio conditional_factor_ratio(unsigned n, unsigned r, const Rational& p, std::uint64_t m,
                                     const PredicateConfig& cfg, unsigned workers = 1);

struct ProcessStep {
  std::uint64_t t = 0;
  VertexMask removed = 0;
  std::uint64_t phi = 0;  // Φ_t
  Rational xi;            // (Φ_{t-1} - Φ_t) / Φ_{t-1}; γ_t once Φ_{t-1} = 0
  Rational gamma;         // (n/r) / (N - t + 1)
  Rational alpha;         // ξ_t - γ_t
};

struct ProcessTrace {
  unsigned n = 0;
  unsigned r = 0;
  std::uint64_t N = 0;
  std::uint64_t phi0 = 0;
  std::vector<ProcessStep> steps;
};

struct ShamirOptions {
  /// Also recount Φ_t from scratch each step and throw std::logic_error if
  /// the incremental value differs.
  bool full_recount = false;
};

/// Removes hyperedges of K_n^{(r)} uniformly at random until stop_m remain.
/// Requires r | n; guarded at n <= 9 for r = 3 and C(n, r) <= 126 otherwise.
ProcessTrace shamir_process(unsigned n, unsigned r, RngStream& rng, std::uint64_t stop_m,
                            const ShamirOptions& options = {});

/// Mean of ξ over the next removal, given the current hypergraph.
Rational expected_next_xi(const RUniformHypergraph& h);

struct ShamirSummary {
  unsigned n = 0;
  unsigned r = 0;
  std::uint64_t N = 0;
  std::uint64_t runs = 0;
  std::uint64_t seed = 0;
  std::uint64_t phi0 = 0;
  std::vector<Rational> gamma;           // t = 1..T
  std::vector<Rational> expected_phi;    // Φ0 ∏_{s<=t} (1 - γ_s)
  std::vector<double> mean_phi, se_phi;  // over runs
  std::vector<double> mean_alpha, se_alpha;
  /// Steps where Φ_t != Φ_{t-1} (1 - ξ_t) as rationals (expected 0).
  std::uint64_t recursion_failures = 0;
  /// Runs whose Φ_t ever increased or whose ξ_t left [0, 1] while Φ_{t-1} > 0
  /// (expected 0).
  std::uint64_t monotonicity_failures = 0;
};

/// `runs` independent runs; run i uses RngStream(seed, i). Reduction is in
/// run order, so the summary does not depend on the worker count.
ShamirSummary run_shamir(unsigned n, unsigned r, std::uint64_t seed, std::uint64_t runs, std::uint64_t stop_m,
                         unsigned workers = 1, const ShamirOptions& options = {});

/// run,t,removed,Phi,xi,gamma,alpha
void write_trace_csv_header(std::ostream& out);
void write_trace_csv(std::ostream& out, const ProcessTrace& trace, std::uint64_t run);
/// t,gamma,expected_Phi,mean_Phi,se_Phi,mean_alpha,se_alpha
void write_summary_csv(std::ostream& out, const ShamirSummary& summary);

}  // namespace clusterlab
