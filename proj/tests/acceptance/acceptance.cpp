// Acceptance run: one PASS/FAIL line per criterion, with wall time.
// `acceptance --calibrate` prints the model-error constant measured at p = 0.2.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "clusterlab/cli.hpp"
#include "clusterlab/cluster_stats.hpp"
#include "clusterlab/distribution_lab.hpp"
#include "clusterlab/event_core.hpp"
#include "clusterlab/factor_lab.hpp"
#include "clusterlab/moments.hpp"

using namespace clusterlab;

namespace {

// Model-error constant, measured at (n=6, r=3, p=0.2) with
// `acceptance --calibrate` and frozen here.
constexpr double kModelConstant = 0.127;  // measured 0.126344, rounded up

struct Result {
  bool ok = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double x, int digits = 3) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

std::vector<VertexMask> all_rsets(unsigned n, unsigned r) {
  std::vector<VertexMask> out;
  for (std::uint64_t i = 0; i < choose_u64(n, r); ++i) out.push_back(unrank_rset(i, n, r));
  return out;
}

RUniformHypergraph random_hypergraph(unsigned n, unsigned r, RngStream& rng) {
  const std::uint64_t keep = 1 + rng.bounded(6);
  std::vector<VertexMask> edges;
  for (auto s : all_rsets(n, r)) {
    if (rng.bounded(16) < keep) edges.push_back(s);
  }
  return RUniformHypergraph(n, r, edges);
}

const std::vector<std::pair<unsigned, unsigned>> kGrid = {{4, 3}, {5, 3}, {6, 3}, {6, 4}, {7, 3}};
const std::vector<Rational> kPs = {Rational(1, 4), Rational(1, 2), Rational(3, 4)};

Result identity_suite() {
  Result res;
  int checked = 0;
  const auto start = Clock::now();
  for (auto [n, r] : kGrid) {
    for (const auto& p : kPs) {
      const auto t = moment_table(n, r, p);
      ExactProb nu_sum(0);
      for (unsigned k = 2; k < r; ++k) nu_sum += t.nu[k];
      bool ok = delta_k_exact(n, r, p, 2) == nu_sum;
      ok = ok && t.lambda == t.delta2 - t.delta2_0 && t.delta2_0 <= t.delta2;
      for (unsigned k = 0; k < r; ++k) {
        ok = ok && t.nu0[k].rational() == rational_pow(p, pairs_in(k)) * t.nu[k].rational();
      }
      ok = ok && phi_value(n, r, p) == phi_brute_force(n, r, p);
      ++checked;
      if (!ok) {
        res.ok = false;
        res.detail += " failed at n=" + std::to_string(n) + " r=" + std::to_string(r) + " p=" + p.get_str();
      }
    }
  }
  const double secs = seconds_since(start);
  if (secs >= 10) res.ok = false;
  res.detail = std::to_string(checked) + " instances, " + fmt(secs) + " s (limit 10 s)" + res.detail;
  return res;
}

Result l2_identity() {
  Result res;
  int checked = 0;
  for (auto [n, r] : kGrid) {
    for (const auto& p : kPs) {
      const auto t = moment_table(n, r, p);
      RngStream rng(2024, n * 100 + r * 10 + checked);
      for (int i = 0; i < 100; ++i) {
        // alternate clique hypergraphs of G(n,p) with arbitrary r-graphs
        const auto h = i % 2 ? clique_hypergraph(sample_gnp(n, p, rng), r) : random_hypergraph(n, r, rng);
        const Rational expected =
            Rational(2 * static_cast<unsigned long>(h.size())) * t.delta2.rational() / t.mu_r.rational();
        if (l2_terms(h).eval(p) != expected) res.ok = false;
        ++checked;
      }
    }
  }
  res.detail = std::to_string(checked) + " outcomes checked exactly";
  return res;
}

Result exact_distribution_checks() {
  Result res;
  double small_secs = 0;
  double n7_secs = 0;
  for (auto [n, r] : kGrid) {
    const auto start = Clock::now();
    const Rational p(1, 2);
    const auto d = exact_distribution(n, r, p);
    const auto t = moment_table(n, r, p);
    bool ok = d.total().rational() == 1;
    ok = ok && expectation(d, [](const RUniformHypergraph& h) { return Rational(static_cast<unsigned long>(h.size())); }) ==
                   t.mu_r.rational();
    ok = ok && expectation(d, [](const RUniformHypergraph& h) { return Rational(count_wk(h, 2)); }) ==
                   t.delta2.rational();
    for (const auto& e : d.entries) ok = ok && is_clique_realizable(e.h);
    if (n <= 5) {
      // every realizable r-graph must appear
      const auto sets = all_rsets(n, r);
      std::uint64_t count = 0;
      for (std::uint64_t s = 0; s < (std::uint64_t{1} << sets.size()); ++s) {
        std::vector<VertexMask> edges;
        for (std::size_t i = 0; i < sets.size(); ++i) {
          if ((s >> i) & 1u) edges.push_back(sets[i]);
        }
        count += is_clique_realizable(RUniformHypergraph(n, r, edges));
      }
      ok = ok && count == d.entries.size();
    }
    const double secs = seconds_since(start);
    if (n <= 6) {
      small_secs += secs;
    } else {
      n7_secs += secs;
    }
    if (!ok) {
      res.ok = false;
      res.detail += " mismatch at n=" + std::to_string(n) + " r=" + std::to_string(r) + ";";
    }
  }
  if (small_secs >= 5 || n7_secs >= 120) res.ok = false;
  res.detail = "n<=6 " + fmt(small_secs) + " s (limit 5 s), n=7 " + fmt(n7_secs) + " s (limit 120 s)" + res.detail;
  return res;
}

Result chain_decomposition() {
  Result res;
  const Rational p(1, 2);
  int exact_checked = 0, orders_checked = 0;
  {
    const auto d = exact_distribution(4, 3, p);
    const auto family = clique_event_family(4, 3);
    for (const auto& e : d.entries) {
      if (conditional_chain(family, outcome_of(family, e.h), p).product_prob != e.prob.rational()) res.ok = false;
      ++exact_checked;
    }
  }
  const auto d5 = exact_distribution(5, 3, p);
  const auto family = clique_event_family(5, 3);
  RngStream rng(77, 0);
  for (int i = 0; i < 50; ++i) {
    const auto h = clique_hypergraph(sample_gnp(5, p, rng), 3);
    const Outcome y = outcome_of(family, h);
    const auto* entry = d5.find(h);
    if (entry == nullptr) {
      res.ok = false;
      continue;
    }
    const Rational expected = entry->prob.rational();
    if (conditional_chain(family, y, p).product_prob != expected) res.ok = false;
    ++exact_checked;
    IndexSet order = y.complement();
    for (int k = 0; k < 10; ++k) {
      for (std::size_t j = order.size(); j > 1; --j) std::swap(order[j - 1], order[rng.bounded(j)]);
      ChainOptions opt;
      opt.order = order;
      if (conditional_chain(family, y, p, opt).product_prob != expected) res.ok = false;
      ++orders_checked;
    }
  }
  res.detail = std::to_string(exact_checked) + " outcomes, " + std::to_string(orders_checked) + " permuted orders";
  return res;
}

Result inequality_suite() {
  Result res;
  RngStream rng(31, 0);
  std::uint64_t graphs = 0;
  for (auto [n, r] : {std::pair{8u, 3u}, std::pair{8u, 4u}, std::pair{10u, 5u}}) {
    const std::uint64_t c = pairs_in(r - 1);
    for (int i = 0; i < 1000; ++i, ++graphs) {
      const auto rep = t_counts(random_hypergraph(n, r, rng), 3);
      std::uint64_t weighted = 0, non_isolated = 0;
      bool ok = true;
      for (unsigned s = 0; s < r; ++s) {
        weighted += pairs_in(s) * rep.t_by_size[s];
        ok = ok && rep.t_isolated[s] <= rep.t_by_size[s];
        if (ok) non_isolated += pairs_in(s) * (rep.t_by_size[s] - rep.t_isolated[s]);
      }
      const std::uint64_t w3 = rep.w.at(3);
      ok = ok && rep.t_total <= weighted && weighted - rep.t_total <= c * w3;
      ok = ok && non_isolated <= 3 * c * w3;
      if (!ok) res.ok = false;
    }
  }
  std::uint64_t instances = 0;
  for (auto [n, r] : {std::pair{4u, 3u}, std::pair{5u, 3u}, std::pair{6u, 3u}, std::pair{6u, 4u}}) {
    const Rational p(1, 2);
    for (const auto& e : exact_distribution(n, r, p).entries) {
      if (complex_terms(e.h).eval(p) > c_hat_terms(e.h).eval(p)) res.ok = false;
      ++instances;
    }
  }
  res.detail = std::to_string(graphs) + " random hypergraphs, C <= C_hat on " + std::to_string(instances) +
               " possible outcomes";
  return res;
}

Result factor_identities() {
  Result res;
  res.ok = count_factors(LabeledGraph::complete(6), 3) == 10 && count_factors(LabeledGraph::complete(9), 3) == 280 &&
           sigma_nm(6, 3, 20).rational() == 10;
  const Rational half(1, 2);
  const auto ef = expected_factors_exact(6, 3, half);
  const auto sigma = sigma_npi(6, 3, ExactProb(half).pow(3));
  res.ok = res.ok && ef == sigma && ef.rational() == Rational(5, 32);
  RngStream rng(606, 0);
  for (int i = 0; i < 500; ++i) {
    const unsigned n = 6 + 3 * (i % 3);
    const auto g = sample_gnp(n, Rational(1, 2) + Rational(i % 4, 8), rng);
    if (count_factors(g, 3) != count_matchings(clique_hypergraph(g, 3))) res.ok = false;
  }
  res.detail = "E[F_3(G(6,1/2))] = " + ef.to_string() + ", 500 random graphs";
  return res;
}

Result shamir_checks() {
  Result res;
  const auto start = Clock::now();
  const auto s = run_shamir(6, 3, 12345, 100000, 0);
  const double secs = seconds_since(start);
  res.ok = s.recursion_failures == 0 && s.monotonicity_failures == 0 && secs < 60;
  const std::size_t t10 = 9;  // Φ_m with m = 10 remaining hyperedges
  const double expected = to_double_rounded(s.expected_phi[t10]);
  const double z = (s.mean_phi[t10] - expected) / s.se_phi[t10];
  res.ok = res.ok && std::abs(z) <= 3;
  double worst = 0;
  for (std::size_t i = 0; i < s.mean_alpha.size(); ++i) {
    if (s.se_alpha[i] == 0) {
      if (s.mean_alpha[i] != 0) res.ok = false;
      continue;
    }
    worst = std::max(worst, std::abs(s.mean_alpha[i]) / s.se_alpha[i]);
  }
  res.ok = res.ok && worst <= 3;
  res.detail = "Phi_10 z=" + fmt(z) + ", max |alpha|/se=" + fmt(worst) + ", " + fmt(secs) + " s (limit 60 s)";
  return res;
}

Result monte_carlo_calibration() {
  const auto start = Clock::now();
  const Rational p(1, 10);
  const auto a = monte_carlo_stats(50, 3, p, 10000, 8);
  const auto b = monte_carlo_stats(30, 3, p, 10000, 9);
  const double mu = moment_table(50, 3, p).mu_r.to_double();
  const double d2 = moment_table(30, 3, p).delta2.to_double();
  const double z1 = (a.at("e").mean - mu) / a.at("e").stderr;
  const double z2 = (b.at("W2").mean - d2) / b.at("W2").stderr;
  return {std::abs(z1) <= 4 && std::abs(z2) <= 4,
          "mu_r z=" + fmt(z1) + ", delta2 z=" + fmt(z2) + ", " + fmt(seconds_since(start)) + " s"};
}

struct ModelFit {
  double max_ratio = 0;  // max over good H of |log Pr - model| / scale
  std::size_t good = 0;
  double tv_lambda = 0;
  double tv_normalized = 0;
};

ModelFit model_fit(const Rational& p) {
  const unsigned n = 6, r = 3;
  const auto d = exact_distribution(n, r, p);
  const auto table = moment_table(n, r, p);
  const auto cfg = default_predicate_config(exact_expectations(d, table));
  const double pi = table.pi.to_double();
  const double scale = cfg.omega * table.xi.to_double() + table.delta2.to_double() / std::sqrt(table.mu_r.to_double()) +
                       pi * pi * static_cast<double>(choose_u64(n, r));
  ModelFit fit;
  for (const auto& e : d.entries) {
    if (e.prob.to_double() <= 1e-12 || !is_good(e.h, cfg).holds) continue;
    ++fit.good;
    fit.max_ratio = std::max(fit.max_ratio, std::abs(e.prob.log() - model_log_prob(e.h, table)) / scale);
  }
  const auto cmp = compare_with_model(d, table);
  fit.tv_lambda = cmp.tv_unnormalized;
  fit.tv_normalized = cmp.tv_normalized.to_double();
  return fit;
}

Result model_diagnostic() {
  Result res;
  const std::vector<Rational> ps = {Rational(1, 10), Rational(2, 10), Rational(3, 10)};
  std::vector<ModelFit> fits;
  for (const auto& p : ps) fits.push_back(model_fit(p));
  std::ostringstream d;
  d << "c=" << kModelConstant;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    d << "; p=" << ps[i].get_str() << " good=" << fits[i].good << " ratio=" << fmt(fits[i].max_ratio)
      << " tv=" << fmt(fits[i].tv_lambda) << " tv_norm=" << fmt(fits[i].tv_normalized);
    if (fits[i].max_ratio > kModelConstant) res.ok = false;
  }
  if (!(fits[0].tv_lambda < fits[1].tv_lambda && fits[1].tv_lambda < fits[2].tv_lambda)) {
    res.ok = false;
    d << "; TV not decreasing as p decreases";
  }
  res.detail = d.str();
  return res;
}

std::string run_capture(const std::vector<std::string>& args, int& code) {
  std::ostringstream out, err;
  code = run_cli(args, out, err);
  return out.str();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

Result reproducibility() {
  Result res;
  const std::vector<std::vector<std::string>> commands = {
      {"moments", "--n", "8", "--r", "3", "--p", "1/3"},
      {"moments", "--n", "40", "--r", "4", "--p", "0.3"},
      {"exactdist", "--n", "5", "--r", "3", "--p", "1/2", "--summary", "@summary"},
      {"simulate", "--n", "12", "--r", "3", "--p", "1/4", "--samples", "400", "--seed", "11", "--heavy",
       "--predicates", "--expectations", "mc"},
      {"simulate", "--n", "20", "--r", "3", "--p", "0.2", "--samples", "300", "--seed", "4", "--format", "json"},
      {"factors", "--n", "6", "--r", "3", "--p", "1/2", "--m", "6"},
      {"shamir", "--n", "6", "--r", "3", "--seed", "5", "--runs", "2000", "--trace", "@trace", "--trace-runs", "3"},
      {"verify", "--grid", "small", "--seed", "3"},
  };
  int compared = 0;
  for (const auto& base : commands) {
    std::string reference;
    bool first = true;
    for (const char* workers : {"1", "2", "8", "8"}) {  // the repeat checks same-seed stability
      std::vector<std::string> args;
      std::vector<std::string> side_files;
      for (const auto& a : base) {
        if (a.size() > 1 && a[0] == '@') {
          side_files.push_back("acceptance_" + a.substr(1) + "_" + workers + ".out");
          args.push_back(side_files.back());
        } else {
          args.push_back(a);
        }
      }
      args.insert(args.end(), {"--workers", workers});
      int code = 0;
      std::string text = run_capture(args, code);
      text += "|exit=" + std::to_string(code);
      for (const auto& f : side_files) {
        text += "|" + slurp(f);
        std::remove(f.c_str());
      }
      if (code != 0) res.ok = false;
      if (first) {
        reference = text;
        first = false;
      } else if (text != reference) {
        res.ok = false;
        res.detail += " differs: " + base[0] + " at " + workers + " workers;";
      }
      ++compared;
    }
  }
  res.detail = std::to_string(commands.size()) + " commands x 4 runs" + res.detail;
  return res;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::string(argv[1]) == "--calibrate") {
    const auto fit = model_fit(Rational(2, 10));
    std::cout << "max ratio at p=0.2: " << fit.max_ratio << " over " << fit.good << " good outcomes\n";
    return 0;
  }
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria = {
      {"identity suite", identity_suite},
      {"L2 identity", l2_identity},
      {"exact distribution", exact_distribution_checks},
      {"chain decomposition", chain_decomposition},
      {"inequality suite", inequality_suite},
      {"factor identities", factor_identities},
      {"shamir process", shamir_checks},
      {"monte carlo calibration", monte_carlo_calibration},
      {"model vs exact", model_diagnostic},
      {"reproducibility", reproducibility},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = Clock::now();
    Result res;
    try {
      res = criteria[i].second();
    } catch (const std::exception& e) {
      res = {false, std::string("exception: ") + e.what()};
    }
    failures += !res.ok;
    std::cout << (res.ok ? "PASS " : "FAIL ") << (i + 1) << " " << criteria[i].first << " ["
              << fmt(seconds_since(start)) << " s] " << res.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
