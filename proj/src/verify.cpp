#include "clusterlab/verify.hpp"

#include <sstream>
#include <stdexcept>

#include "clusterlab/factor_lab.hpp"

namespace clusterlab {

namespace {

struct Stop {};

class Suite {
 public:
  explicit Suite(const std::function<void(const IdentityResult&)>& report) : report_(report) {}

  void check(const std::string& name, bool ok, const std::string& detail = {}) {
    report_({name, ok, detail});
    if (!ok) throw Stop{};
    ++passed_;
  }
  std::size_t passed() const { return passed_; }

 private:
  const std::function<void(const IdentityResult&)>& report_;
  std::size_t passed_ = 0;
};

std::string tag(unsigned n, unsigned r, const Rational& p) {
  std::ostringstream s;
  s << "(n=" << n << ",r=" << r << ",p=" << p.get_str() << ")";
  return s.str();
}

std::string tag(unsigned n, unsigned r) { return "(n=" + std::to_string(n) + ",r=" + std::to_string(r) + ")"; }

std::vector<VertexMask> all_rsets(unsigned n, unsigned r) {
  std::vector<VertexMask> out;
  for (std::uint64_t i = 0; i < choose_u64(n, r); ++i) out.push_back(unrank_rset(i, n, r));
  return out;
}

RUniformHypergraph random_hypergraph(unsigned n, unsigned r, RngStream& rng) {
  const std::uint64_t keep = 1 + rng.bounded(6);  // density keep/16
  std::vector<VertexMask> edges;
  for (auto s : all_rsets(n, r)) {
    if (rng.bounded(16) < keep) edges.push_back(s);
  }
  return RUniformHypergraph(n, r, edges);
}

void moment_identities(Suite& suite, unsigned n, unsigned r, const Rational& p, unsigned workers) {
  const auto t = moment_table(n, r, p);
  const auto where = tag(n, r, p);
  ExactProb nu_sum(0);
  for (unsigned k = 2; k < r; ++k) nu_sum += t.nu[k];
  suite.check("delta2 enumerated = sum of nu_k " + where, delta_k_exact(n, r, p, 2, workers) == nu_sum);
  suite.check("lambda = delta2 - delta2_0 >= 0 " + where,
              t.lambda == t.delta2 - t.delta2_0 && t.delta2_0 <= t.delta2);
  bool nu0 = true;
  for (unsigned k = 0; k < r; ++k) nu0 = nu0 && t.nu0[k].rational() == rational_pow(p, pairs_in(k)) * t.nu[k].rational();
  suite.check("nu0_k = p^C(k,2) nu_k " + where, nu0);
  suite.check("phi closed form = brute-force maximum " + where, phi_value(n, r, p) == phi_brute_force(n, r, p));
}

void outcome_identities(Suite& suite, unsigned n, unsigned r, const Rational& p, RngStream& rng, int samples) {
  const auto t = moment_table(n, r, p);
  const auto where = tag(n, r, p);
  bool l2 = true, q = true;
  for (int i = 0; i < samples; ++i) {
    auto h = random_hypergraph(n, r, rng);
    const Rational expected = Rational(2 * static_cast<unsigned long>(h.size())) * t.delta2.rational() / t.mu_r.rational();
    l2 = l2 && l2_terms(h).eval(p) == expected;
    q = q && q2(h) == count_wk(h, 2);
  }
  suite.check("L2 = (2 e(H) / mu_r) delta2 " + where, l2);
  suite.check("Q2 = W2 " + where, q);
}

void pair_bounds(Suite& suite, unsigned n, unsigned r, RngStream& rng, int samples) {
  bool repeated = true, isolated = true, order = true;
  const std::uint64_t c = pairs_in(r - 1);
  for (int i = 0; i < samples; ++i) {
    const auto rep = t_counts(random_hypergraph(n, r, rng), 3);
    std::uint64_t weighted = 0, non_isolated = 0;
    for (unsigned s = 0; s < r; ++s) {
      weighted += pairs_in(s) * rep.t_by_size[s];
      order = order && rep.t_isolated[s] <= rep.t_by_size[s];
      if (rep.t_isolated[s] <= rep.t_by_size[s]) non_isolated += pairs_in(s) * (rep.t_by_size[s] - rep.t_isolated[s]);
    }
    const std::uint64_t w3 = rep.w.at(3);
    repeated = repeated && rep.t_total <= weighted && weighted - rep.t_total <= c * w3;
    isolated = isolated && non_isolated <= 3 * c * w3;
  }
  const auto where = tag(n, r);
  suite.check("t_s^- <= t_s " + where, order);
  suite.check("0 <= sum C(s,2) t_s - t <= C(r-1,2) W3 " + where, repeated);
  suite.check("0 <= sum C(s,2) (t_s - t_s^-) <= 3 C(r-1,2) W3 " + where, isolated);
}

void distribution_identities(Suite& suite, unsigned n, unsigned r, const Rational& p, unsigned workers,
                             bool full_support) {
  const auto d = exact_distribution(n, r, p, {.workers = workers});
  const auto t = moment_table(n, r, p);
  const auto where = tag(n, r, p);
  suite.check("total mass = 1 " + where, d.total().rational() == 1);
  suite.check("E[e(H)] = mu_r " + where,
              expectation(d, [](const RUniformHypergraph& h) { return Rational(static_cast<unsigned long>(h.size())); }) ==
                  t.mu_r.rational());
  suite.check("E[W2] = delta2 " + where,
              expectation(d, [](const RUniformHypergraph& h) { return Rational(count_wk(h, 2)); }) ==
                  t.delta2.rational());
  bool tk = true;
  for (unsigned k = 0; k < r; ++k) {
    tk = tk && expectation(d, [k](const RUniformHypergraph& h) { return Rational(t_counts(h, 2).t_by_size[k]); }) ==
                   t.nu[k].rational();
  }
  suite.check("E[t_k] = nu_k " + where, tk);

  bool realizable = true;
  for (const auto& e : d.entries) realizable = realizable && is_clique_realizable(e.h);
  if (full_support) {
    const auto sets = all_rsets(n, r);
    std::uint64_t count = 0;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << sets.size()); ++s) {
      std::vector<VertexMask> edges;
      for (std::size_t i = 0; i < sets.size(); ++i) {
        if ((s >> i) & 1u) edges.push_back(sets[i]);
      }
      count += is_clique_realizable(RUniformHypergraph(n, r, edges));
    }
    realizable = realizable && count == d.entries.size();
  }
  suite.check("Pr(H) > 0 iff H realizable " + where, realizable);

  bool bounds = true;
  Rational ec = 0, ech = 0;
  for (const auto& e : d.entries) {
    const Rational c = complex_terms(e.h).eval(p);
    const Rational ch = c_hat_terms(e.h).eval(p);
    const Rational chl = c_hat_legal_terms(e.h).eval(p);
    bounds = bounds && c <= ch && chl <= ch && (!is_legal(e.h) || c <= chl);
    ec += e.prob.rational() * c;
    ech += e.prob.rational() * ch;
  }
  suite.check("C <= C_hat, C_hat_L <= C_hat, C <= C_hat_L if legal " + where, bounds);
  suite.check("E[C] <= E[C_hat] " + where, ec <= ech);
  if (n <= 5) {
    Rational pi1 = 0;
    for (const auto& s : star_clusters(RUniformHypergraph(n, r, all_rsets(n, r)))) {
      pi1 += rational_pow(p, s.leaf_union + s.uncovered);
    }
    suite.check("E[C_hat] = sum of pi_1 over star-clusters " + where, ech == pi1);
  }
}

void chain_identities(Suite& suite, const Rational& p) {
  const auto d = exact_distribution(4, 3, p);
  const auto family = clique_event_family(4, 3);
  bool ok = true;
  for (const auto& e : d.entries) {
    const Outcome y = outcome_of(family, e.h);
    ok = ok && conditional_chain(family, y, p).product_prob == e.prob.rational();
  }
  suite.check("chain product = Pr(I = Y) for every possible Y " + tag(4, 3, p), ok);
}

void factor_identities(Suite& suite, unsigned workers, RngStream& rng, int graphs) {
  suite.check("F_3(K_6) = 10", count_factors(LabeledGraph::complete(6), 3) == 10);
  suite.check("F_3(K_9) = 280", count_factors(LabeledGraph::complete(9), 3) == 280);
  suite.check("Sigma(6,3,m=20) = 10", sigma_nm(6, 3, 20).rational() == 10);
  for (auto [n, r] : {std::pair{3u, 3u}, std::pair{4u, 4u}, std::pair{6u, 3u}}) {
    for (const Rational& p : {Rational(1, 4), Rational(1, 2), Rational(3, 4)}) {
      suite.check("E[F_r] = Sigma(n, pi) " + tag(n, r, p),
                  expected_factors_exact(n, r, p, workers) == sigma_npi(n, r, ExactProb(p).pow(pairs_in(r))));
    }
  }
  bool same = true;
  for (int i = 0; i < graphs; ++i) {
    const unsigned n = i % 2 ? 9 : 6;
    auto g = sample_gnp(n, Rational(2, 3), rng);
    same = same && count_factors(g, 3) == count_matchings(clique_hypergraph(g, 3));
  }
  suite.check("F_3(G) = M(H_3(G)) on random graphs", same);
}

void shamir_identities(Suite& suite, std::uint64_t seed, int runs) {
  bool recursion = true, mean = true;
  for (int run = 0; run < runs; ++run) {
    RngStream rng(seed, static_cast<std::uint64_t>(run));
    const auto tr = shamir_process(6, 3, rng, 0, {.full_recount = true});
    std::vector<VertexMask> remaining = all_rsets(6, 3);
    Rational prev(static_cast<unsigned long>(tr.phi0));
    for (const auto& st : tr.steps) {
      const Rational cur(static_cast<unsigned long>(st.phi));
      recursion = recursion && prev * (1 - st.xi) == cur && st.alpha == st.xi - st.gamma;
      if (sgn(prev) > 0) mean = mean && expected_next_xi(RUniformHypergraph(6, 3, remaining)) == st.gamma;
      std::erase(remaining, st.removed);
      prev = cur;
    }
  }
  suite.check("Phi_t = Phi_{t-1} (1 - xi_t) along shamir runs (n=6,r=3)", recursion);
  suite.check("E[xi_t | state] = gamma_t along shamir runs (n=6,r=3)", mean);
}

}  // namespace

std::size_t run_identity_suite(const VerifyOptions& options,
                               const std::function<void(const IdentityResult&)>& report) {
  const bool medium = options.grid == "medium";
  if (!medium && options.grid != "small") throw std::invalid_argument("unknown grid: " + options.grid);
  Suite suite(report);
  RngStream rng(options.seed, 0);
  std::vector<std::pair<unsigned, unsigned>> grid = {{4, 3}, {5, 3}, {6, 3}, {6, 4}};
  if (medium) grid.emplace_back(7, 3);
  const std::vector<Rational> ps = {Rational(1, 4), Rational(1, 2), Rational(3, 4)};
  try {
    for (auto [n, r] : grid) {
      for (const auto& p : ps) {
        moment_identities(suite, n, r, p, options.workers);
        outcome_identities(suite, n, r, p, rng, medium ? 100 : 20);
      }
    }
    for (auto [n, r] : {std::pair{8u, 3u}, std::pair{8u, 4u}, std::pair{10u, 5u}}) {
      pair_bounds(suite, n, r, rng, medium ? 1000 : 100);
    }
    for (auto [n, r] : grid) {
      if (n == 7 && r == 3) {
        distribution_identities(suite, n, r, Rational(1, 2), options.workers, false);
        continue;
      }
      for (const auto& p : medium ? ps : std::vector<Rational>{Rational(1, 2)}) {
        distribution_identities(suite, n, r, p, options.workers, n <= 5 || (medium && p == Rational(1, 2)));
      }
    }
    chain_identities(suite, Rational(1, 2));
    chain_identities(suite, Rational(1, 3));
    factor_identities(suite, options.workers, rng, medium ? 500 : 100);
    shamir_identities(suite, options.seed, medium ? 200 : 20);
  } catch (const Stop&) {
  }
  return suite.passed();
}

}  // namespace clusterlab
