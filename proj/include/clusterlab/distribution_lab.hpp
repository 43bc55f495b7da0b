#pragma once

// The law of H_r(G(n,p)): exact enumeration at small n, the reweighted
// binomial model, total variation, the typicality predicates and Monte Carlo
// summaries at larger n.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "clusterlab/cluster_stats.hpp"
#include "clusterlab/moments.hpp"

namespace clusterlab {

/// Canonical order of hypergraphs: edge lists compared lexicographically.
bool canonical_less(const RUniformHypergraph& a, const RUniformHypergraph& b);

struct DistributionEntry {
  RUniformHypergraph h;
  ExactProb prob;
  double stderr = 0;  // estimated mode only
};

struct Distribution {
  enum class Mode { kExact, kEstimated };

  unsigned n = 0;
  unsigned r = 0;
  Mode mode = Mode::kExact;
  std::vector<DistributionEntry> entries;  // canonical order, nonzero probs

  ExactProb total() const;
  /// nullptr when H has probability zero.
  const DistributionEntry* find(const RUniformHypergraph& h) const;
};

struct ExactDistOptions {
  unsigned workers = 1;
  /// n = 8 (2^28 graphs) is refused unless this is set.
  bool allow_n8 = false;
};

/// Pr(H) summed over all labeled graphs on [n]. Requires 3 <= r <= n,
/// 0 <= p <= 1 and C(n,2) <= 21 (n = 8 with allow_n8).
Distribution exact_distribution(unsigned n, unsigned r, const Rational& p, const ExactDistOptions& options = {});

/// Σ_H Pr(H) f(H) over an exact distribution.
Rational expectation(const Distribution& d, const std::function<Rational(const RUniformHypergraph&)>& f);

/// Empirical law of H_r(G(n,p)) from `samples` draws; sample s uses
/// RngStream(seed, s).
Distribution empirical_distribution(unsigned n, unsigned r, const Rational& p, std::uint64_t samples,
                                    std::uint64_t seed, unsigned workers = 1);

/// ½ Σ |d1(H) - d2(H)| over the union of supports. Exact when both are.
ExactProb tv_distance(const Distribution& d1, const Distribution& d2);

enum class LambdaChoice { kLambda, kLambdaPrime };

/// e log π + (N - e) log(1 - π) - t(H) log p - Λ (or Λ').
double model_log_prob(const RUniformHypergraph& h, const MomentTable& table,
                      LambdaChoice choice = LambdaChoice::kLambda);

/// π^e (1-π)^{N-e} p^{-t(H)}, i.e. the model weight without e^{-Λ}.
ExactProb model_weight(const RUniformHypergraph& h, const MomentTable& table);

struct ModelComparison {
  /// Model restricted to the support of the exact law and renormalized; the
  /// e^{-Λ} factor cancels, so this is exact.
  Distribution normalized;
  ExactProb tv_normalized;
  /// Unnormalized model mass on realizable H, and on the rest when
  /// C(n,r) <= 22 (all 2^N hypergraphs enumerated).
  double realizable_mass = 0;
  std::optional<double> unrealizable_mass;
  /// ½ (Σ_realizable |Pr(H) - model(H)| + unrealizable mass).
  double tv_unnormalized = 0;
};

ModelComparison compare_with_model(const Distribution& exact, const MomentTable& table,
                                   LambdaChoice choice = LambdaChoice::kLambda);

struct Estimate {
  double value = 0;
  double stderr = 0;
};

/// Reference expectations under G(n,p) used by the predicates.
struct Expectations {
  MomentTable table;
  std::optional<Estimate> q2;
  std::optional<Estimate> q3;
  std::optional<Estimate> q4;
  std::optional<Estimate> c;
  std::optional<Estimate> c_hat_legal;
  std::optional<Estimate> delta3;
};

/// E[Q_i], E[C], E[Ĉ_L] from an exact distribution, Δ_3 by enumeration.
Expectations exact_expectations(const Distribution& exact, const MomentTable& table);

struct PredicateConfig {
  double omega = 0;
  double plaus_C = 1;
  double plaus_delta = 0.2;
  Expectations expectations;
};

/// ω = log log max(n,3) + 3, C = 1, δ = 0.2.
PredicateConfig default_predicate_config(Expectations expectations);

struct PredicateReport {
  bool holds = true;
  std::vector<std::string> failed;  // violated clauses
  explicit operator bool() const { return holds; }
};

/// Throw std::invalid_argument when a needed expectation is missing or the
/// config is out of range.
PredicateReport is_good(const RUniformHypergraph& h, const PredicateConfig& cfg);
PredicateReport is_plausible(const RUniformHypergraph& h, const PredicateConfig& cfg);
PredicateReport is_well_behaved(const RUniformHypergraph& h, const PredicateConfig& cfg);
PredicateReport is_reasonable(const RUniformHypergraph& h, const PredicateConfig& cfg);

struct McStatistic {
  std::string name;
  double mean = 0;
  double stderr = 0;
  std::uint64_t count = 0;
};

struct McOptions {
  unsigned workers = 1;
  /// Adds W3, Q3, Q4, C, C_hat, C_hat_L and legal.
  bool heavy = false;
  /// Adds the plausible indicator; good, well_behaved and reasonable too when
  /// the expectations they need are present.
  std::optional<PredicateConfig> predicates;
};

struct McSummary {
  unsigned n = 0;
  unsigned r = 0;
  Rational p;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<McStatistic> stats;

  /// Throws std::out_of_range for an unknown name.
  const McStatistic& at(const std::string& name) const;
};

/// Per-sample statistics of H_r(G(n,p)). Sample s draws from
/// RngStream(seed, s) and values are reduced in sample order, so the result
/// does not depend on the worker count.
McSummary monte_carlo_stats(unsigned n, unsigned r, const Rational& p, std::uint64_t samples, std::uint64_t seed,
                            const McOptions& options = {});

/// Expectations with Monte Carlo estimates filled in (heavy statistics).
Expectations estimated_expectations(const McSummary& summary, const MomentTable& table);

/// One JSON object per line: {"edges":[[...]],"prob":"num/den"}.
void write_jsonl(std::ostream& out, const Distribution& d, bool decimal = false);
/// statistic,mean,stderr,count
void write_csv(std::ostream& out, const McSummary& summary);

}  // namespace clusterlab
