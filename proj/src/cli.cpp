#include "clusterlab/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "clusterlab/factor_lab.hpp"
#include "clusterlab/parallel.hpp"
#include "clusterlab/verify.hpp"

namespace clusterlab {

namespace {

using json = nlohmann::ordered_json;

struct Common {
  unsigned workers = default_workers();
  std::string out_path;
};

struct ModelParams {
  unsigned n = 0;
  unsigned r = 0;
  std::string p = "1/2";
};

// Thrown by handlers that already printed their message.
struct Exit {
  int code;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--workers", c.workers, "worker threads (outputs do not depend on it)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--out", c.out_path, "write the main output to this file instead of stdout");
}

void add_model(CLI::App* sub, ModelParams& m, bool need_p) {
  sub->add_option("--n", m.n, "number of vertices")->required();
  sub->add_option("--r", m.r, "clique size")->required();
  auto* p = sub->add_option("--p", m.p, "edge probability, \"a/b\" or a decimal");
  if (need_p) p->required();
}

ProbabilityInput read_p(const std::string& text, std::ostream& err) {
  auto in = parse_probability(text);
  if (in.from_decimal) {
    err << "warning: decimal p=" << text << " read as " << in.value.get_str()
        << "; float mode: decimal output, exact-equality checks disabled\n";
  }
  return in;
}

std::string str(const BigInt& z) { return z.get_str(); }

void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out_path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open " + c.out_path);
  f << text;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open " + path);
  return f;
}

// --- moments -------------------------------------------------------------

struct MomentsCmd {
  Common common;
  ModelParams model;
};

void cmd_moments(const MomentsCmd& c, std::ostream& out, std::ostream& err) {
  if (c.model.r > c.model.n) throw std::invalid_argument("need r <= n");
  const auto p = read_p(c.model.p, err);
  emit(c.common, to_json(moment_table(c.model.n, c.model.r, p.value, p.from_decimal)).dump(2) + "\n", out);
}

// --- exactdist -----------------------------------------------------------

struct ExactDistCmd {
  Common common;
  ModelParams model;
  bool allow_n8 = false;
  std::string summary_path;
};

void cmd_exactdist(const ExactDistCmd& c, std::ostream& out, std::ostream& err) {
  const auto p = read_p(c.model.p, err);
  const auto d = exact_distribution(c.model.n, c.model.r, p.value, {.workers = c.common.workers, .allow_n8 = c.allow_n8});
  std::ostringstream buf;
  write_jsonl(buf, d, p.from_decimal);
  emit(c.common, buf.str(), out);
  if (c.summary_path.empty()) return;

  if (sgn(p.value) == 0 || p.value == 1) throw std::invalid_argument("--summary needs 0 < p < 1");
  const auto t = moment_table(c.model.n, c.model.r, p.value, p.from_decimal);
  const auto cmp = compare_with_model(d, t);
  const auto cmp_prime = compare_with_model(d, t, LambdaChoice::kLambdaPrime);
  const bool dec = p.from_decimal;
  json j;
  j["n"] = std::to_string(d.n);
  j["r"] = std::to_string(d.r);
  j["p"] = t.p.to_string(dec);
  j["support"] = std::to_string(d.entries.size());
  j["total"] = d.total().to_string(dec);
  j["mean_e"] = ExactProb(expectation(d, [](const RUniformHypergraph& h) {
                  return Rational(static_cast<unsigned long>(h.size()));
                })).to_string(dec);
  j["mu_r"] = t.mu_r.to_string(dec);
  j["tv_model_normalized"] = cmp.tv_normalized.to_string(dec);
  j["tv_model"] = format_real(cmp.tv_unnormalized);
  j["tv_model_lambda_prime"] = format_real(cmp_prime.tv_unnormalized);
  j["model_mass_realizable"] = format_real(cmp.realizable_mass);
  j["model_mass_unrealizable"] = cmp.unrealizable_mass ? format_real(*cmp.unrealizable_mass) : "not enumerated";
  Common side;
  side.out_path = c.summary_path;
  emit(side, j.dump(2) + "\n", out);
}

// --- simulate ------------------------------------------------------------

struct SimulateCmd {
  Common common;
  ModelParams model;
  std::uint64_t samples = 1000;
  std::uint64_t seed = 1;
  bool heavy = false;
  bool predicates = false;
  std::string expectations = "none";
  std::optional<double> omega;
  double plaus_C = 1;
  double plaus_delta = 0.2;
  std::string format = "csv";
};

void cmd_simulate(const SimulateCmd& c, std::ostream& out, std::ostream& err) {
  const auto p = read_p(c.model.p, err);
  const unsigned n = c.model.n, r = c.model.r;
  McOptions opt;
  opt.workers = c.common.workers;
  opt.heavy = c.heavy;
  if (c.predicates) {
    if (sgn(p.value) == 0 || p.value == 1) throw std::invalid_argument("predicates need 0 < p < 1");
    const auto table = moment_table(n, r, p.value, p.from_decimal);
    Expectations x;
    x.table = table;
    if (c.expectations == "exact") {
      x = exact_expectations(exact_distribution(n, r, p.value, {.workers = c.common.workers}), table);
    } else if (c.expectations == "mc") {
      McOptions pilot;
      pilot.workers = c.common.workers;
      pilot.heavy = true;
      x = estimated_expectations(monte_carlo_stats(n, r, p.value, c.samples, c.seed + 1, pilot), table);
    }
    auto cfg = default_predicate_config(x);
    if (c.omega) cfg.omega = *c.omega;
    cfg.plaus_C = c.plaus_C;
    cfg.plaus_delta = c.plaus_delta;
    if (!(cfg.plaus_delta > 0 && cfg.plaus_delta < 0.25)) throw std::invalid_argument("--plaus-delta must lie in (0, 1/4)");
    opt.predicates = cfg;
  }
  const auto s = monte_carlo_stats(n, r, p.value, c.samples, c.seed, opt);
  std::ostringstream buf;
  if (c.format == "csv") {
    write_csv(buf, s);
  } else {
    json j;
    j["n"] = std::to_string(n);
    j["r"] = std::to_string(r);
    j["p"] = ExactProb(p.value).to_string(p.from_decimal);
    j["samples"] = std::to_string(s.samples);
    j["seed"] = std::to_string(s.seed);
    json stats = json::array();
    for (const auto& st : s.stats) {
      stats.push_back({{"name", st.name},
                       {"mean", format_real(st.mean)},
                       {"stderr", format_real(st.stderr)},
                       {"count", std::to_string(st.count)}});
    }
    j["stats"] = stats;
    buf << j.dump(2) << '\n';
  }
  emit(c.common, buf.str(), out);
}

// --- factors -------------------------------------------------------------

struct FactorsCmd {
  Common common;
  unsigned n = 0;
  unsigned r = 0;
  std::optional<std::string> p;
  std::optional<std::uint64_t> m;
  std::string graph_path;
  std::string hypergraph_path;
};

void cmd_factors(const FactorsCmd& c, std::ostream& out, std::ostream& err) {
  json j;
  int code = kExitOk;
  if (!c.graph_path.empty()) {
    auto in = open_input(c.graph_path);
    const auto g = read_graph(in);
    j["n"] = std::to_string(g.n());
    j["r"] = std::to_string(c.r);
    j["F_r"] = str(count_factors(g, c.r));
    j["M_clique_hypergraph"] = str(count_matchings(clique_hypergraph(g, c.r)));
  } else if (!c.hypergraph_path.empty()) {
    auto in = open_input(c.hypergraph_path);
    const auto h = read_hypergraph(in);
    j["n"] = std::to_string(h.n());
    j["r"] = std::to_string(h.r());
    j["M"] = str(count_matchings(h));
  } else {
    if (c.n == 0 || c.r == 0) throw std::invalid_argument("--n and --r are required without --graph/--hypergraph");
    j["n"] = std::to_string(c.n);
    j["r"] = std::to_string(c.r);
    j["F_r_complete"] = str(matching_count_complete(c.n, c.r));
    if (c.p) {
      const auto p = read_p(*c.p, err);
      const bool dec = p.from_decimal;
      const auto ef = expected_factors_exact(c.n, c.r, p.value, c.common.workers);
      const auto sigma = sigma_npi(c.n, c.r, ExactProb(p.value).pow(pairs_in(c.r)));
      // Decimal input disables the exact comparison.
      const bool holds = dec ? std::abs(ef.to_double() - sigma.to_double()) <= 1e-12 * std::max(1.0, sigma.to_double())
                             : ef == sigma;
      j["p"] = ExactProb(p.value).to_string(dec);
      j["E_F_r"] = ef.to_string(dec);
      j["sigma_npi"] = sigma.to_string(dec);
      j["identity"] = holds ? "holds" : "fails";
      if (!holds) code = kExitIdentityFailure;
      if (c.m) {
        const BigInt m(static_cast<unsigned long>(*c.m));
        j["sigma_nm"] = sigma_nm(c.n, c.r, m).to_string(dec);
        const auto ratio = ratio_sigma(c.n, c.r, m);
        j["ratio_sigma"] = ratio.exact.to_string(dec);
        j["ratio_sigma_leading"] = format_real(ratio.leading_approx);
        const auto table = moment_table(c.n, c.r, p.value, dec);
        auto cfg = default_predicate_config(
            exact_expectations(exact_distribution(c.n, c.r, p.value, {.workers = c.common.workers}), table));
        const auto x = conditional_factor_ratio(c.n, c.r, p.value, *c.m, cfg, c.common.workers);
        j["ratio_diagnostic"] = {{"m", std::to_string(x.m)},
                                 {"binomial_prob", x.binomial_prob.to_string(dec)},
                                 {"lhs", x.lhs.to_string(dec)},
                                 {"lhs_any", x.lhs_any.to_string(dec)},
                                 {"rhs", format_real(x.rhs)},
                                 {"log_ratio", format_real(x.log_ratio)}};
      }
    } else if (c.m) {
      const BigInt m(static_cast<unsigned long>(*c.m));
      j["sigma_nm"] = sigma_nm(c.n, c.r, m).to_string();
    }
  }
  emit(c.common, j.dump(2) + "\n", out);
  if (code != kExitOk) {
    err << "identity E[F_r] = Sigma(n, pi) failed\n";
    throw Exit{code};
  }
}

// --- shamir --------------------------------------------------------------

struct ShamirCmd {
  Common common;
  unsigned n = 0;
  unsigned r = 0;
  std::uint64_t seed = 1;
  std::uint64_t runs = 1000;
  std::uint64_t stop_m = 0;
  std::string trace_path;
  std::uint64_t trace_runs = 1;
  bool full_recount = false;
};

void cmd_shamir(const ShamirCmd& c, std::ostream& out, std::ostream& err) {
  const ShamirOptions opt{.full_recount = c.full_recount};
  const auto s = run_shamir(c.n, c.r, c.seed, c.runs, c.stop_m, c.common.workers, opt);
  std::ostringstream buf;
  write_summary_csv(buf, s);
  emit(c.common, buf.str(), out);
  if (!c.trace_path.empty()) {
    std::ostringstream tr;
    write_trace_csv_header(tr);
    for (std::uint64_t run = 0; run < std::min(c.trace_runs, c.runs); ++run) {
      RngStream rng(c.seed, run);
      write_trace_csv(tr, shamir_process(c.n, c.r, rng, c.stop_m, opt), run);
    }
    Common side;
    side.out_path = c.trace_path;
    emit(side, tr.str(), out);
  }
  if (s.recursion_failures != 0 || s.monotonicity_failures != 0) {
    err << "shamir: " << s.recursion_failures << " recursion failures, " << s.monotonicity_failures
        << " monotonicity failures\n";
    throw Exit{kExitIdentityFailure};
  }
}

// --- verify --------------------------------------------------------------

struct VerifyCmd {
  Common common;
  std::string grid = "small";
  std::uint64_t seed = 1;
};

void cmd_verify(const VerifyCmd& c, std::ostream& out, std::ostream& err) {
  std::ostringstream buf;
  std::optional<IdentityResult> failed;
  const auto passed = run_identity_suite({.grid = c.grid, .workers = c.common.workers, .seed = c.seed},
                                         [&](const IdentityResult& res) {
                                           buf << (res.ok ? "PASS " : "FAIL ") << res.name;
                                           if (!res.detail.empty()) buf << ": " << res.detail;
                                           buf << '\n';
                                           if (!res.ok) failed = res;
                                         });
  if (failed) {
    emit(c.common, buf.str(), out);
    err << "first failed identity: " << failed->name << '\n';
    throw Exit{kExitIdentityFailure};
  }
  buf << "verify: " << passed << " identities passed (grid " << c.grid << ")\n";
  emit(c.common, buf.str(), out);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"clusterlab: K_r-copies in G(n,p), exact and simulated"};
  app.name("clusterlab");
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML or INI file with option values");
  app.allow_config_extras(CLI::config_extras_mode::error);

  MomentsCmd moments;
  auto* sm = app.add_subcommand("moments", "closed-form moment table");
  add_common(sm, moments.common);
  add_model(sm, moments.model, false);

  ExactDistCmd exactdist;
  auto* se = app.add_subcommand("exactdist", "exact law of H_r(G(n,p)) as JSON lines");
  add_common(se, exactdist.common);
  add_model(se, exactdist.model, true);
  se->add_flag("--allow-n8", exactdist.allow_n8, "permit n = 8 (2^28 graphs)");
  se->add_option("--summary", exactdist.summary_path, "write a JSON summary with the model comparison");

  SimulateCmd simulate;
  auto* ss = app.add_subcommand("simulate", "Monte Carlo statistics");
  add_common(ss, simulate.common);
  add_model(ss, simulate.model, true);
  ss->add_option("--samples", simulate.samples)->check(CLI::PositiveNumber);
  ss->add_option("--seed", simulate.seed);
  ss->add_flag("--heavy", simulate.heavy, "also W3, Q3, Q4, C, C_hat, C_hat_L, legal");
  ss->add_flag("--predicates", simulate.predicates, "also the typicality indicators");
  ss->add_option("--expectations", simulate.expectations, "reference expectations for the predicates")
      ->check(CLI::IsMember({"none", "exact", "mc"}));
  ss->add_option("--omega", simulate.omega)->check(CLI::PositiveNumber);
  ss->add_option("--plaus-C", simulate.plaus_C)->check(CLI::PositiveNumber);
  ss->add_option("--plaus-delta", simulate.plaus_delta);
  ss->add_option("--format", simulate.format)->check(CLI::IsMember({"csv", "json"}));

  FactorsCmd factors;
  auto* sf = app.add_subcommand("factors", "K_r-factor and matching counts");
  add_common(sf, factors.common);
  sf->add_option("--n", factors.n);
  sf->add_option("--r", factors.r);
  sf->add_option("--p", factors.p);
  sf->add_option("--m", factors.m);
  sf->add_option("--graph", factors.graph_path, "graph file (needs --r)");
  sf->add_option("--hypergraph", factors.hypergraph_path, "hypergraph file");

  ShamirCmd shamir;
  auto* sh = app.add_subcommand("shamir", "random hyperedge deletion process");
  add_common(sh, shamir.common);
  sh->add_option("--n", shamir.n)->required();
  sh->add_option("--r", shamir.r)->required();
  sh->add_option("--seed", shamir.seed);
  sh->add_option("--runs", shamir.runs)->check(CLI::PositiveNumber);
  sh->add_option("--stop-m", shamir.stop_m, "stop when this many hyperedges remain");
  sh->add_option("--trace", shamir.trace_path, "write per-step traces to this CSV file");
  sh->add_option("--trace-runs", shamir.trace_runs, "number of runs to trace");
  sh->add_flag("--full-recount", shamir.full_recount, "cross-check every step with a full recount");

  VerifyCmd verify;
  auto* sv = app.add_subcommand("verify", "exact identity suite");
  add_common(sv, verify.common);
  sv->add_option("--grid", verify.grid)->check(CLI::IsMember({"small", "medium"}));
  sv->add_option("--seed", verify.seed);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (sm->parsed()) cmd_moments(moments, out, err);
    if (se->parsed()) cmd_exactdist(exactdist, out, err);
    if (ss->parsed()) cmd_simulate(simulate, out, err);
    if (sf->parsed()) cmd_factors(factors, out, err);
    if (sh->parsed()) cmd_shamir(shamir, out, err);
    if (sv->parsed()) cmd_verify(verify, out, err);
  } catch (const Exit& e) {
    return e.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace clusterlab
