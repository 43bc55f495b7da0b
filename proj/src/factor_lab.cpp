#include "clusterlab/factor_lab.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "clusterlab/parallel.hpp"

namespace clusterlab {

namespace {

constexpr unsigned kMemoFrom = 16;  // memoize on the covered set from this n up

void check_divides(unsigned n, unsigned r) {
  if (r == 0 || r > n || n % r != 0) throw std::invalid_argument("r must divide n");
  check_guard(n <= 30, "matching count: n above 30");
}

std::uint64_t add_checked(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s;
  if (__builtin_add_overflow(a, b, &s)) throw std::overflow_error("matching count exceeds 64 bits");
  return s;
}

BigInt big(std::uint64_t x) {
  BigInt z;
  mpz_import(z.get_mpz_t(), 1, -1, sizeof x, 0, 0, &x);
  return z;
}

VertexMask full_set(unsigned n) { return n >= 64 ? ~VertexMask{0} : bit(n) - 1; }

// Perfect matchings by branching on the lowest uncovered vertex. Edges are
// filed under their lowest vertex; `alive` switches edges off.
class Matcher {
 public:
  Matcher(unsigned n, const std::vector<VertexMask>& edges) : n_(n), full_(full_set(n)), by_low_(n) {
    for (std::uint32_t i = 0; i < edges.size(); ++i) {
      by_low_[std::countr_zero(edges[i])].push_back({edges[i], i});
    }
    alive_.assign(edges.size(), 1);
  }

  void kill(std::uint32_t id) { alive_[id] = 0; }

  std::uint64_t count(VertexMask covered) {
    memo_.clear();
    return rec(covered);
  }

 private:
  std::uint64_t rec(VertexMask covered) {
    if (covered == full_) return 1;
    if (n_ >= kMemoFrom) {
      auto it = memo_.find(covered);
      if (it != memo_.end()) return it->second;
    }
    const auto v = static_cast<unsigned>(std::countr_zero(~covered & full_));
    std::uint64_t total = 0;
    for (const auto& [e, id] : by_low_[v]) {
      if (alive_[id] && (e & covered) == 0) total = add_checked(total, rec(covered | e));
    }
    if (n_ >= kMemoFrom) memo_.emplace(covered, total);
    return total;
  }

  unsigned n_;
  VertexMask full_;
  std::vector<std::vector<std::pair<VertexMask, std::uint32_t>>> by_low_;
  std::vector<char> alive_;
  std::unordered_map<VertexMask, std::uint64_t> memo_;
};

// K_r-factors straight from the adjacency rows.
class FactorCounter {
 public:
  FactorCounter(const LabeledGraph& g, unsigned r) : n_(g.n()), r_(r), full_(full_set(g.n())) {
    for (unsigned v = 0; v < n_; ++v) rows_.push_back(g.row(v));
  }

  std::uint64_t count() { return rec(0); }

 private:
  std::uint64_t rec(VertexMask covered) {
    if (covered == full_) return 1;
    if (n_ >= kMemoFrom) {
      auto it = memo_.find(covered);
      if (it != memo_.end()) return it->second;
    }
    const auto v = static_cast<unsigned>(std::countr_zero(~covered & full_));
    std::uint64_t total = 0;
    extend(covered | bit(v), rows_[v] & ~covered, r_ - 1, total);
    if (n_ >= kMemoFrom) memo_.emplace(covered, total);
    return total;
  }

  // Grow the clique through v one vertex at a time from `cand`.
  void extend(VertexMask chosen, VertexMask cand, unsigned need, std::uint64_t& total) {
    if (need == 0) {
      total = add_checked(total, rec(chosen));
      return;
    }
    while (popcount(cand) >= need) {
      const auto w = static_cast<unsigned>(std::countr_zero(cand));
      cand &= cand - 1;
      extend(chosen | bit(w), cand & rows_[w], need - 1, total);
    }
  }

  unsigned n_;
  unsigned r_;
  VertexMask full_;
  std::vector<VertexMask> rows_;
  std::unordered_map<VertexMask, std::uint64_t> memo_;
};

// a^e (b-a)^{M-e} for p = a/b, and b^M.
std::vector<BigInt> graph_weights(const Rational& p, unsigned pairs, BigInt& den) {
  const BigInt a = p.get_num();
  const BigInt rest = p.get_den() - a;
  std::vector<BigInt> w(pairs + 1);
  for (unsigned e = 0; e <= pairs; ++e) {
    BigInt x, y;
    mpz_pow_ui(x.get_mpz_t(), a.get_mpz_t(), e);
    mpz_pow_ui(y.get_mpz_t(), rest.get_mpz_t(), pairs - e);
    w[e] = x * y;
  }
  const BigInt b = p.get_den();
  mpz_pow_ui(den.get_mpz_t(), b.get_mpz_t(), pairs);
  return w;
}

std::string tuple_string(VertexMask m) {
  std::string s;
  for (auto v : mask_to_tuple(m)) {
    if (!s.empty()) s += '-';
    s += std::to_string(v);
  }
  return s;
}

}  // namespace

BigInt count_factors(const LabeledGraph& g, unsigned r) {
  check_divides(g.n(), r);
  return big(FactorCounter(g, r).count());
}

BigInt count_matchings(const RUniformHypergraph& h) {
  check_divides(h.n(), h.r());
  return big(Matcher(h.n(), h.edges()).count(0));
}

BigInt count_matchings_containing(const RUniformHypergraph& h, VertexMask f) {
  check_divides(h.n(), h.r());
  if (!h.contains(f)) throw std::invalid_argument("forced edge is not an edge of H");
  return big(Matcher(h.n(), h.edges()).count(f));
}

ExactProb expected_factors_exact(unsigned n, unsigned r, const Rational& p, unsigned workers) {
  check_divides(n, r);
  if (sgn(p) < 0 || p > 1) throw std::invalid_argument("need 0 <= p <= 1");
  const unsigned pairs = n * (n - 1) / 2;
  check_guard(pairs <= 21, "expected_factors_exact: more than 2^21 graphs");
  if (pairs > 40) throw std::invalid_argument("expected_factors_exact: n too large to enumerate");
  std::vector<std::pair<unsigned, unsigned>> pair_of(pairs);
  for (unsigned u = 0; u < n; ++u) {
    for (unsigned v = u + 1; v < n; ++v) pair_of[pair_index(u, v, n)] = {u, v};
  }
  const unsigned high = std::min(6u, pairs);
  const unsigned low = pairs - high;
  std::vector<std::vector<std::uint64_t>> by_chunk(std::size_t{1} << high, std::vector<std::uint64_t>(pairs + 1));
  parallel_tasks(by_chunk.size(), workers, [&](std::size_t chunk, unsigned) {
    for (std::uint64_t lo = 0; lo < (std::uint64_t{1} << low); ++lo) {
      const std::uint64_t mask = (static_cast<std::uint64_t>(chunk) << low) | lo;
      LabeledGraph g(n);
      for (std::uint64_t m = mask; m; m &= m - 1) {
        const auto [u, v] = pair_of[std::countr_zero(m)];
        g.add_edge(u, v);
      }
      auto& slot = by_chunk[chunk][static_cast<unsigned>(std::popcount(mask))];
      slot = add_checked(slot, FactorCounter(g, r).count());
    }
  });
  BigInt den;
  const auto weight = graph_weights(p, pairs, den);
  BigInt num = 0;
  for (const auto& chunk : by_chunk) {
    for (unsigned e = 0; e <= pairs; ++e) num += big(chunk[e]) * weight[e];
  }
  Rational q(num, den);
  q.canonicalize();
  return ExactProb(q);
}

FactorRatio conditional_factor_ratio(unsigned n, unsigned r, const Rational& p, std::uint64_t m,
                                     const PredicateConfig& cfg, unsigned workers) {
  check_divides(n, r);
  const auto& t = cfg.expectations.table;
  if (t.n != n || t.r != r || !t.p.is_exact() || t.p.rational() != p) {
    throw std::invalid_argument("expectations computed for other (n, r, p)");
  }
  const std::uint64_t N = t.N.get_ui();
  const unsigned k = n / r;
  if (m > N) throw std::invalid_argument("m above C(n, r): Pr(Bin(N, pi) = m) = 0");
  if (m < k) throw std::invalid_argument("m below n/r: no perfect matching possible");
  const double mu = t.mu_r.to_double();
  if (std::abs(static_cast<double>(m) - mu) > cfg.omega * std::sqrt(mu)) {
    throw std::invalid_argument("need |m - mu_r| <= omega*sqrt(mu_r)");
  }

  FactorRatio out;
  out.n = n;
  out.r = r;
  out.m = m;
  const auto d = exact_distribution(n, r, p, {.workers = workers});
  Rational any = 0;
  Rational well = 0;
  for (const auto& e : d.entries) {
    if (e.h.size() != m) continue;
    const Rational w = e.prob.rational() * Rational(count_matchings(e.h));
    any += w;
    if (is_well_behaved(e.h, cfg).holds) well += w;
  }
  out.binomial_prob = ExactProb(Rational(binomial(N, m))) * t.pi.pow(static_cast<long>(m)) *
                      t.pi.complement().pow(static_cast<long>(N - m));
  out.lhs = ExactProb(well) / out.binomial_prob;
  out.lhs_any = ExactProb(any) / out.binomial_prob;

  Rational falling_ratio(falling_factorial(BigInt(static_cast<unsigned long>(m)), k), falling_factorial(t.N, k));
  falling_ratio.canonicalize();
  const double falling = to_double_rounded(falling_ratio);
  const double exponent = k >= 2 ? -static_cast<double>(pairs_in(k)) / static_cast<double>(pairs_in(m)) *
                                       (t.delta2 - t.delta2_0).to_double()
                                 : 0.0;
  out.rhs = matching_count_complete(n, r).get_d() * falling * std::exp(exponent);
  out.log_ratio = out.lhs.is_zero() ? -std::numeric_limits<double>::infinity() : out.lhs.log() - std::log(out.rhs);
  return out;
}

ProcessTrace shamir_process(unsigned n, unsigned r, RngStream& rng, std::uint64_t stop_m,
                            const ShamirOptions& options) {
  check_divides(n, r);
  const std::uint64_t N = choose_u64(n, r);
  check_guard(r == 3 ? n <= 9 : N <= 126, "shamir_process: hypergraph too large");
  if (stop_m > N) throw std::invalid_argument("stop_m above C(n, r)");
  std::vector<VertexMask> edges(N);
  for (std::uint64_t i = 0; i < N; ++i) edges[i] = unrank_rset(i, n, r);
  Matcher matcher(n, edges);

  ProcessTrace trace;
  trace.n = n;
  trace.r = r;
  trace.N = N;
  trace.phi0 = matcher.count(0);
  std::vector<std::uint32_t> order(N);
  for (std::uint32_t i = 0; i < N; ++i) order[i] = i;
  std::uint64_t phi = trace.phi0;
  const Rational per_matching(static_cast<unsigned long>(n / r));
  for (std::uint64_t t = 1; t <= N - stop_m; ++t) {
    const std::uint64_t pick = (t - 1) + rng.bounded(N - t + 1);
    std::swap(order[t - 1], order[pick]);
    const std::uint32_t id = order[t - 1];
    // Matchings lost are exactly those using the removed edge.
    const std::uint64_t lost = matcher.count(edges[id]);
    matcher.kill(id);
    ProcessStep step;
    step.t = t;
    step.removed = edges[id];
    step.phi = phi - lost;
    if (options.full_recount && matcher.count(0) != step.phi) {
      throw std::logic_error("incremental matching count disagrees with recount");
    }
    step.gamma = per_matching / Rational(big(N - t + 1));
    // frozen after extinction: xi = gamma keeps alpha a martingale difference
    if (phi == 0) {
      step.xi = step.gamma;
    } else {
      step.xi = Rational(big(lost), big(phi));
      step.xi.canonicalize();
    }
    step.alpha = step.xi - step.gamma;
    phi = step.phi;
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

Rational expected_next_xi(const RUniformHypergraph& h) {
  check_divides(h.n(), h.r());
  if (h.empty()) throw std::invalid_argument("no edge left to remove");
  Matcher matcher(h.n(), h.edges());
  const std::uint64_t total = matcher.count(0);
  if (total == 0) return 0;
  BigInt lost = 0;
  for (auto f : h.edges()) lost += big(matcher.count(f));
  Rational mean(lost, big(total) * big(h.size()));
  mean.canonicalize();
  return mean;
}

ShamirSummary run_shamir(unsigned n, unsigned r, std::uint64_t seed, std::uint64_t runs, std::uint64_t stop_m,
                         unsigned workers, const ShamirOptions& options) {
  if (runs == 0) throw std::invalid_argument("runs must be at least 1");
  check_divides(n, r);
  ShamirSummary s;
  s.n = n;
  s.r = r;
  s.N = choose_u64(n, r);
  s.runs = runs;
  s.seed = seed;
  if (stop_m > s.N) throw std::invalid_argument("stop_m above C(n, r)");
  const std::uint64_t steps = s.N - stop_m;
  std::vector<double> phi(runs * steps);
  std::vector<double> alpha(runs * steps);
  std::vector<std::uint64_t> recursion_bad(runs);
  std::vector<std::uint8_t> monotone_bad(runs);
  std::vector<std::uint64_t> phi0(runs);

  parallel_tasks(runs, workers, [&](std::size_t run, unsigned) {
    RngStream rng(seed, run);
    const auto trace = shamir_process(n, r, rng, stop_m, options);
    phi0[run] = trace.phi0;
    Rational prev(big(trace.phi0));
    for (std::uint64_t i = 0; i < steps; ++i) {
      const auto& st = trace.steps[i];
      const Rational cur(big(st.phi));
      if (prev * (1 - st.xi) != cur) ++recursion_bad[run];
      if (cur > prev || (sgn(prev) > 0 && (sgn(st.xi) < 0 || st.xi > 1))) monotone_bad[run] = 1;
      phi[run * steps + i] = static_cast<double>(st.phi);
      alpha[run * steps + i] = to_double_rounded(st.alpha);
      prev = cur;
    }
  });

  s.phi0 = phi0[0];
  Rational expected(big(s.phi0));
  const Rational per_matching(static_cast<unsigned long>(n / r));
  for (std::uint64_t t = 1; t <= steps; ++t) {
    Rational g = per_matching / Rational(big(s.N - t + 1));
    g.canonicalize();
    expected *= 1 - g;
    s.gamma.push_back(g);
    s.expected_phi.push_back(expected);
  }
  const double count = static_cast<double>(runs);
  auto reduce = [&](const std::vector<double>& v, std::uint64_t i, double& mean, double& se) {
    double sum = 0;
    for (std::uint64_t run = 0; run < runs; ++run) sum += v[run * steps + i];
    mean = sum / count;
    double sq = 0;
    for (std::uint64_t run = 0; run < runs; ++run) {
      const double d = v[run * steps + i] - mean;
      sq += d * d;
    }
    se = runs > 1 ? std::sqrt(sq / (count - 1) / count) : 0;
  };
  for (std::uint64_t i = 0; i < steps; ++i) {
    double m, e;
    reduce(phi, i, m, e);
    s.mean_phi.push_back(m);
    s.se_phi.push_back(e);
    reduce(alpha, i, m, e);
    s.mean_alpha.push_back(m);
    s.se_alpha.push_back(e);
  }
  for (std::uint64_t run = 0; run < runs; ++run) {
    s.recursion_failures += recursion_bad[run];
    s.monotonicity_failures += monotone_bad[run];
  }
  return s;
}

void write_trace_csv_header(std::ostream& out) { out << "run,t,removed,Phi,xi,gamma,alpha\n"; }

void write_trace_csv(std::ostream& out, const ProcessTrace& trace, std::uint64_t run) {
  for (const auto& st : trace.steps) {
    out << run << ',' << st.t << ',' << tuple_string(st.removed) << ',' << st.phi << ','
        << format_real(to_double_rounded(st.xi)) << ',' << format_real(to_double_rounded(st.gamma)) << ','
        << format_real(to_double_rounded(st.alpha)) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const ShamirSummary& s) {
  out << "t,gamma,expected_Phi,mean_Phi,se_Phi,mean_alpha,se_alpha\n";
  for (std::size_t i = 0; i < s.gamma.size(); ++i) {
    out << i + 1 << ',' << format_real(to_double_rounded(s.gamma[i])) << ','
        << format_real(to_double_rounded(s.expected_phi[i])) << ',' << format_real(s.mean_phi[i]) << ','
        << format_real(s.se_phi[i]) << ',' << format_real(s.mean_alpha[i]) << ',' << format_real(s.se_alpha[i])
        << '\n';
  }
}

}  // namespace clusterlab
