#include "clusterlab/distribution_lab.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "clusterlab/parallel.hpp"

namespace clusterlab {

namespace {

using Key = unsigned __int128;  // bit i: the r-set of rank i is a clique

struct KeyHash {
  std::size_t operator()(Key k) const {
    const auto lo = static_cast<std::uint64_t>(k);
    const auto hi = static_cast<std::uint64_t>(k >> 64);
    return std::hash<std::uint64_t>{}(lo ^ (hi * 0x9e3779b97f4a7c15ull));
  }
};

constexpr unsigned kMaxPairs = 28;
using EdgeCounts = std::array<std::uint32_t, kMaxPairs + 1>;  // by e(G)
using CountMap = std::unordered_map<Key, EdgeCounts, KeyHash>;

template <class Fn>
void cliques_in(const VertexMask* rows, VertexMask cand, unsigned need, VertexMask chosen, Fn& fn) {
  if (need == 0) {
    fn(chosen);
    return;
  }
  while (popcount(cand) >= need) {
    const auto v = static_cast<unsigned>(std::countr_zero(cand));
    cand &= cand - 1;
    cliques_in(rows, cand & rows[v], need - 1, chosen | bit(v), fn);
  }
}

void check_exact(const Distribution& d) {
  if (d.mode != Distribution::Mode::kExact) throw std::invalid_argument("needs an exact distribution");
}

double logn_power(unsigned n, double c) { return std::pow(std::log(static_cast<double>(n)), c); }

const Estimate& need(const std::optional<Estimate>& e, const char* name) {
  if (!e) throw std::invalid_argument(std::string("missing expectation ") + name);
  return *e;
}

void check_config(const RUniformHypergraph& h, const PredicateConfig& cfg) {
  if (!(cfg.omega > 0)) throw std::invalid_argument("omega must be positive");
  if (!(cfg.plaus_C > 0)) throw std::invalid_argument("plaus_C must be positive");
  if (!(cfg.plaus_delta > 0 && cfg.plaus_delta < 0.25)) throw std::invalid_argument("plaus_delta must lie in (0, 1/4)");
  const auto& t = cfg.expectations.table;
  if (t.n != h.n() || t.r != h.r()) throw std::invalid_argument("expectations computed for other (n, r)");
}

void fail(PredicateReport& rep, std::string clause) {
  rep.holds = false;
  rep.failed.push_back(std::move(clause));
}

void merge_into(PredicateReport& rep, const PredicateReport& part) {
  rep.holds = rep.holds && part.holds;
  rep.failed.insert(rep.failed.end(), part.failed.begin(), part.failed.end());
}

}  // namespace

bool canonical_less(const RUniformHypergraph& a, const RUniformHypergraph& b) {
  return std::lexicographical_compare(a.edges().begin(), a.edges().end(), b.edges().begin(), b.edges().end(),
                                      lex_less);
}

ExactProb Distribution::total() const {
  ExactProb sum(0);
  for (const auto& e : entries) sum += e.prob;
  return sum;
}

const DistributionEntry* Distribution::find(const RUniformHypergraph& h) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), h,
                             [](const DistributionEntry& e, const RUniformHypergraph& x) { return canonical_less(e.h, x); });
  if (it == entries.end() || !(it->h == h)) return nullptr;
  return &*it;
}

Distribution exact_distribution(unsigned n, unsigned r, const Rational& p, const ExactDistOptions& options) {
  if (r < 3 || r > n) throw std::invalid_argument("need 3 <= r <= n");
  if (sgn(p) < 0 || p > 1) throw std::invalid_argument("need 0 <= p <= 1");
  const unsigned pairs = n * (n - 1) / 2;
  const auto rsets = choose_u64(n, r);
  if (pairs > kMaxPairs || rsets > 128) throw std::invalid_argument("exact_distribution: n too large to enumerate");
  check_guard(pairs <= 21 || (n == 8 && options.allow_n8), "exact_distribution: more than 2^21 graphs");

  std::vector<std::pair<unsigned, unsigned>> pair_of(pairs);
  for (unsigned u = 0; u < n; ++u) {
    for (unsigned v = u + 1; v < n; ++v) pair_of[pair_index(u, v, n)] = {u, v};
  }
  std::vector<std::uint32_t> rank_of(std::size_t{1} << n, 0);
  for (std::uint64_t i = 0; i < rsets; ++i) rank_of[unrank_rset(i, n, r)] = static_cast<std::uint32_t>(i);

  const unsigned high = std::min(6u, pairs);
  const unsigned low = pairs - high;
  CountMap merged;
  std::mutex merge_mutex;

  parallel_tasks(std::size_t{1} << high, options.workers, [&](std::size_t chunk, unsigned) {
    std::array<VertexMask, kMaxVertices> rows{};
    unsigned edges = 0;
    for (unsigned b = 0; b < high; ++b) {
      if ((chunk >> b) & 1u) {
        const auto [u, v] = pair_of[low + b];
        rows[u] |= bit(v);
        rows[v] |= bit(u);
        ++edges;
      }
    }
    Key key = 0;
    auto flip = [&](VertexMask clique) { key ^= Key{1} << rank_of[clique]; };
    cliques_in(rows.data(), bit(n) - 1, r, 0, flip);

    CountMap local;
    ++local[key][edges];
    for (std::uint64_t i = 1; i < (std::uint64_t{1} << low); ++i) {
      const auto [u, v] = pair_of[std::countr_zero(i)];
      // Cliques through uv appear or vanish with the edge.
      const VertexMask both = bit(u) | bit(v);
      auto flip_with_uv = [&](VertexMask rest) { flip(rest | both); };
      cliques_in(rows.data(), rows[u] & rows[v], r - 2, 0, flip_with_uv);
      const bool present = (rows[u] >> v) & 1u;
      rows[u] ^= bit(v);
      rows[v] ^= bit(u);
      edges = present ? edges - 1 : edges + 1;
      ++local[key][edges];
    }
    std::lock_guard<std::mutex> lock(merge_mutex);
    for (const auto& [k, counts] : local) {
      auto& into = merged[k];
      for (unsigned e = 0; e <= pairs; ++e) into[e] += counts[e];
    }
  });

  // Pr(G) = a^e (b-a)^{M-e} / b^M with p = a/b.
  const BigInt a = p.get_num();
  const BigInt b = p.get_den();
  std::vector<BigInt> weight(pairs + 1);
  for (unsigned e = 0; e <= pairs; ++e) {
    BigInt x;
    BigInt y;
    mpz_pow_ui(x.get_mpz_t(), a.get_mpz_t(), e);
    const BigInt rest = b - a;
    mpz_pow_ui(y.get_mpz_t(), rest.get_mpz_t(), pairs - e);
    weight[e] = x * y;
  }
  BigInt den;
  mpz_pow_ui(den.get_mpz_t(), b.get_mpz_t(), pairs);

  Distribution d;
  d.n = n;
  d.r = r;
  d.mode = Distribution::Mode::kExact;
  d.entries.reserve(merged.size());
  for (const auto& [k, counts] : merged) {
    BigInt num = 0;
    for (unsigned e = 0; e <= pairs; ++e) {
      if (counts[e] != 0) num += BigInt(static_cast<unsigned long>(counts[e])) * weight[e];
    }
    if (sgn(num) == 0) continue;
    Rational q(num, den);
    q.canonicalize();
    std::vector<VertexMask> edges;
    for (std::uint64_t i = 0; i < rsets; ++i) {
      if ((k >> i) & 1u) edges.push_back(unrank_rset(i, n, r));
    }
    d.entries.push_back({RUniformHypergraph(n, r, std::move(edges)), ExactProb(q), 0});
  }
  std::sort(d.entries.begin(), d.entries.end(),
            [](const DistributionEntry& x, const DistributionEntry& y) { return canonical_less(x.h, y.h); });
  return d;
}

Rational expectation(const Distribution& d, const std::function<Rational(const RUniformHypergraph&)>& f) {
  check_exact(d);
  Rational sum = 0;
  for (const auto& e : d.entries) sum += e.prob.rational() * f(e.h);
  return sum;
}

Distribution empirical_distribution(unsigned n, unsigned r, const Rational& p, std::uint64_t samples,
                                    std::uint64_t seed, unsigned workers) {
  if (samples == 0) throw std::invalid_argument("samples must be at least 1");
  const auto threshold = bernoulli_threshold(p);
  std::vector<RUniformHypergraph> drawn(samples, RUniformHypergraph(n, r));
  parallel_tasks(samples, workers, [&](std::size_t s, unsigned) {
    RngStream rng(seed, s);
    drawn[s] = clique_hypergraph(sample_gnp(n, threshold, rng), r);
  });
  std::sort(drawn.begin(), drawn.end(), canonical_less);
  Distribution d;
  d.n = n;
  d.r = r;
  d.mode = Distribution::Mode::kEstimated;
  const double total = static_cast<double>(samples);
  for (std::size_t i = 0; i < drawn.size();) {
    std::size_t j = i;
    while (j < drawn.size() && drawn[j] == drawn[i]) ++j;
    const double f = static_cast<double>(j - i) / total;
    d.entries.push_back({drawn[i], ExactProb(Rational(static_cast<unsigned long>(j - i), samples)),
                         std::sqrt(f * (1 - f) / total)});
    i = j;
  }
  return d;
}

ExactProb tv_distance(const Distribution& d1, const Distribution& d2) {
  ExactProb sum(0);
  auto absdiff = [](const ExactProb& x, const ExactProb& y) { return x >= y ? x - y : y - x; };
  std::size_t i = 0;
  std::size_t j = 0;
  const auto& a = d1.entries;
  const auto& b = d2.entries;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && canonical_less(a[i].h, b[j].h))) {
      sum += a[i++].prob;
    } else if (i == a.size() || canonical_less(b[j].h, a[i].h)) {
      sum += b[j++].prob;
    } else {
      sum += absdiff(a[i++].prob, b[j++].prob);
    }
  }
  return sum * ExactProb(Rational(1, 2));
}

double model_log_prob(const RUniformHypergraph& h, const MomentTable& table, LambdaChoice choice) {
  const double e = static_cast<double>(h.size());
  const double N = table.N.get_d();
  const double t = static_cast<double>(t_of(h));
  const double lambda = (choice == LambdaChoice::kLambda ? table.lambda : table.lambda_prime).to_double();
  return e * table.pi.log() + (N - e) * table.pi.complement().log() - t * table.p.log() - lambda;
}

ExactProb model_weight(const RUniformHypergraph& h, const MomentTable& table) {
  const long e = static_cast<long>(h.size());
  const long N = table.N.get_si();
  return table.pi.pow(e) * table.pi.complement().pow(N - e) * table.p.pow(-static_cast<long>(t_of(h)));
}

ModelComparison compare_with_model(const Distribution& exact, const MomentTable& table, LambdaChoice choice) {
  check_exact(exact);
  if (exact.n != table.n || exact.r != table.r) throw std::invalid_argument("table computed for other (n, r)");
  ModelComparison out;
  out.normalized.n = exact.n;
  out.normalized.r = exact.r;
  out.normalized.mode = Distribution::Mode::kExact;
  ExactProb z(0);
  double tv = 0;
  for (const auto& e : exact.entries) {
    const ExactProb w = model_weight(e.h, table);
    z += w;
    out.normalized.entries.push_back({e.h, w, 0});
    const double m = std::exp(model_log_prob(e.h, table, choice));
    out.realizable_mass += m;
    tv += std::abs(e.prob.to_double() - m);
  }
  for (auto& e : out.normalized.entries) e.prob = e.prob / z;
  out.tv_normalized = tv_distance(exact, out.normalized);

  const auto N = table.N.get_ui();
  if (table.N <= 22) {
    // Histogram of (e, t) over unrealizable hypergraphs on all 2^N subsets.
    const unsigned n = table.n;
    const unsigned r = table.r;
    std::vector<VertexMask> rsets(N);
    for (unsigned long i = 0; i < N; ++i) rsets[i] = unrank_rset(i, n, r);
    std::map<std::pair<unsigned, unsigned>, std::uint64_t> hist;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << N); ++s) {
      std::array<VertexMask, kMaxVertices> rows{};
      unsigned e = 0;
      for (std::uint64_t m = s; m; m &= m - 1) {
        const VertexMask set = rsets[std::countr_zero(m)];
        for (VertexMask w = set; w; w &= w - 1) {
          const auto v = static_cast<unsigned>(std::countr_zero(w));
          rows[v] |= set & ~bit(v);
        }
        ++e;
      }
      unsigned shadow = 0;
      for (unsigned v = 0; v < n; ++v) shadow += popcount(rows[v]);
      shadow /= 2;
      unsigned cliques = 0;
      auto count = [&](VertexMask) { ++cliques; };
      cliques_in(rows.data(), bit(n) - 1, r, 0, count);
      if (cliques != e) ++hist[{e, static_cast<unsigned>(pairs_in(r) * e - shadow)}];
    }
    const double lambda = (choice == LambdaChoice::kLambda ? table.lambda : table.lambda_prime).to_double();
    double mass = 0;
    for (const auto& [et, count] : hist) {
      const double e = et.first;
      mass += static_cast<double>(count) *
              std::exp(e * table.pi.log() + (static_cast<double>(N) - e) * table.pi.complement().log() -
                       et.second * table.p.log() - lambda);
    }
    out.unrealizable_mass = mass;
    tv += mass;
  }
  out.tv_unnormalized = tv / 2;
  return out;
}

Expectations exact_expectations(const Distribution& exact, const MomentTable& table) {
  check_exact(exact);
  const Rational& p = table.p.rational();
  Expectations x;
  x.table = table;
  Rational q2s = 0, q3s = 0, q4s = 0, cs = 0, chl = 0;
  for (const auto& e : exact.entries) {
    const Rational& w = e.prob.rational();
    q2s += w * Rational(static_cast<unsigned long>(q2(e.h)));
    q3s += w * q3_terms(e.h).eval(p);
    q4s += w * q4_terms(e.h).eval(p);
    cs += w * complex_terms(e.h).eval(p);
    chl += w * c_hat_legal_terms(e.h).eval(p);
  }
  x.q2 = Estimate{to_double_rounded(q2s), 0};
  x.q3 = Estimate{to_double_rounded(q3s), 0};
  x.q4 = Estimate{to_double_rounded(q4s), 0};
  x.c = Estimate{to_double_rounded(cs), 0};
  x.c_hat_legal = Estimate{to_double_rounded(chl), 0};
  x.delta3 = Estimate{delta_k_exact(table.n, table.r, p, 3).to_double(), 0};
  return x;
}

PredicateConfig default_predicate_config(Expectations expectations) {
  PredicateConfig cfg;
  const double n = std::max(3u, expectations.table.n);
  cfg.omega = std::log(std::log(n)) + 3;
  cfg.plaus_C = 1;
  cfg.plaus_delta = 0.2;
  cfg.expectations = std::move(expectations);
  return cfg;
}

PredicateReport is_good(const RUniformHypergraph& h, const PredicateConfig& cfg) {
  check_config(h, cfg);
  const auto& x = cfg.expectations;
  const auto& eq2 = need(x.q2, "E[Q2]");
  const auto& eq3 = need(x.q3, "E[Q3]");
  const auto& eq4 = need(x.q4, "E[Q4]");
  const auto& ec = need(x.c, "E[C]");
  const double p = x.table.p.to_double();
  const double mu = x.table.mu_r.to_double();
  const double w = cfg.omega;
  PredicateReport rep;
  const bool realizable = is_clique_realizable(h);
  if (!realizable) fail(rep, "not H_r(G)");
  if (std::abs(static_cast<double>(h.size()) - mu) > w * std::sqrt(mu)) fail(rep, "|e(H)-mu_r| > omega*sqrt(mu_r)");
  if (static_cast<double>(q2(h)) > w * eq2.value) fail(rep, "Q2 > omega*E[Q2]");
  if (q3_terms(h).eval(p) > w * eq3.value) fail(rep, "Q3 > omega*E[Q3]");
  if (q4_terms(h).eval(p) > w * eq4.value) fail(rep, "Q4 > omega*E[Q4]");
  if (realizable && complex_terms(h).eval(p) > w * ec.value) fail(rep, "C > omega*E[C]");
  return rep;
}

PredicateReport is_plausible(const RUniformHypergraph& h, const PredicateConfig& cfg) {
  check_config(h, cfg);
  const auto& t = cfg.expectations.table;
  const unsigned r = t.r;
  const auto report = t_counts(h, 2);
  const double bound = logn_power(t.n, cfg.plaus_C);
  PredicateReport rep;
  for (unsigned k : {0u, 1u, 2u, r - 1}) {
    if (k == r - 1 && r - 1 <= 2) continue;
    if (static_cast<double>(report.t_by_size[k]) > bound * t.nu[k].to_double()) {
      fail(rep, "t_" + std::to_string(k) + " > (log n)^C*nu_" + std::to_string(k));
    }
  }
  for (unsigned k = 3; k + 2 <= r; ++k) {
    if (report.t_by_size[k] != 0) fail(rep, "t_" + std::to_string(k) + " != 0");
  }
  const double mu = t.mu_r.to_double();
  if (std::abs(static_cast<double>(h.size()) - mu) > std::pow(static_cast<double>(t.n), 1 - cfg.plaus_delta)) {
    fail(rep, "|e(H)-mu_r| > n^(1-delta)");
  }
  return rep;
}

PredicateReport is_well_behaved(const RUniformHypergraph& h, const PredicateConfig& cfg) {
  const auto& d3 = need(cfg.expectations.delta3, "Delta3");
  PredicateReport rep = is_good(h, cfg);
  if (static_cast<double>(count_wk(h, 3)) > cfg.omega * d3.value) fail(rep, "W3 > omega*Delta3");
  return rep;
}

PredicateReport is_reasonable(const RUniformHypergraph& h, const PredicateConfig& cfg) {
  const auto& ecl = need(cfg.expectations.c_hat_legal, "E[C_hat_L]");
  PredicateReport rep;
  merge_into(rep, is_plausible(h, cfg));
  if (!is_legal(h)) fail(rep, "not legal");
  const double p = cfg.expectations.table.p.to_double();
  if (c_hat_legal_terms(h).eval(p) > logn_power(h.n(), cfg.plaus_C) * ecl.value) {
    fail(rep, "C_hat_L > (log n)^C*E[C_hat_L]");
  }
  return rep;
}

const McStatistic& McSummary::at(const std::string& name) const {
  for (const auto& s : stats) {
    if (s.name == name) return s;
  }
  throw std::out_of_range("no statistic " + name);
}

McSummary monte_carlo_stats(unsigned n, unsigned r, const Rational& p, std::uint64_t samples, std::uint64_t seed,
                            const McOptions& options) {
  if (samples == 0) throw std::invalid_argument("samples must be at least 1");
  if (r < 3 || r > n) throw std::invalid_argument("need 3 <= r <= n");
  std::vector<std::string> names = {"e", "W2", "t"};
  if (options.heavy) {
    for (const char* s : {"W3", "Q3", "Q4", "C", "C_hat", "C_hat_L", "legal"}) names.emplace_back(s);
  }
  bool good = false, well = false, reasonable = false;
  if (options.predicates) {
    const auto& x = options.predicates->expectations;
    names.emplace_back("plausible");
    good = x.q2 && x.q3 && x.q4 && x.c;
    well = good && x.delta3;
    reasonable = x.c_hat_legal.has_value();
    if (good) names.emplace_back("good");
    if (well) names.emplace_back("well_behaved");
    if (reasonable) names.emplace_back("reasonable");
  }
  const std::size_t width = names.size();
  const auto threshold = bernoulli_threshold(p);
  const double pd = to_double_rounded(p);
  std::vector<double> values(samples * width);

  parallel_tasks(samples, options.workers, [&](std::size_t s, unsigned) {
    RngStream rng(seed, s);
    const auto h = clique_hypergraph(sample_gnp(n, threshold, rng), r);
    double* out = values.data() + s * width;
    std::size_t c = 0;
    out[c++] = static_cast<double>(h.size());
    out[c++] = static_cast<double>(count_wk(h, 2));
    out[c++] = static_cast<double>(t_of(h));
    if (options.heavy) {
      out[c++] = static_cast<double>(count_wk(h, 3));
      out[c++] = q3_terms(h).eval(pd);
      out[c++] = q4_terms(h).eval(pd);
      out[c++] = complex_terms(h).eval(pd);
      out[c++] = c_hat_terms(h).eval(pd);
      out[c++] = c_hat_legal_terms(h).eval(pd);
      out[c++] = is_legal(h) ? 1 : 0;
    }
    if (options.predicates) {
      const auto& cfg = *options.predicates;
      out[c++] = is_plausible(h, cfg) ? 1 : 0;
      if (good) out[c++] = is_good(h, cfg) ? 1 : 0;
      if (well) out[c++] = is_well_behaved(h, cfg) ? 1 : 0;
      if (reasonable) out[c++] = is_reasonable(h, cfg) ? 1 : 0;
    }
  });

  McSummary summary;
  summary.n = n;
  summary.r = r;
  summary.p = p;
  summary.samples = samples;
  summary.seed = seed;
  const double count = static_cast<double>(samples);
  for (std::size_t c = 0; c < width; ++c) {
    double sum = 0;
    for (std::uint64_t s = 0; s < samples; ++s) sum += values[s * width + c];
    const double mean = sum / count;
    double sq = 0;
    for (std::uint64_t s = 0; s < samples; ++s) {
      const double d = values[s * width + c] - mean;
      sq += d * d;
    }
    const double se = samples > 1 ? std::sqrt(sq / (count - 1) / count) : 0;
    summary.stats.push_back({names[c], mean, se, samples});
  }
  return summary;
}

Expectations estimated_expectations(const McSummary& summary, const MomentTable& table) {
  Expectations x;
  x.table = table;
  auto get = [&](const char* name) -> std::optional<Estimate> {
    for (const auto& s : summary.stats) {
      if (s.name == name) return Estimate{s.mean, s.stderr};
    }
    return std::nullopt;
  };
  x.q2 = get("W2");
  x.q3 = get("Q3");
  x.q4 = get("Q4");
  x.c = get("C");
  x.c_hat_legal = get("C_hat_L");
  x.delta3 = get("W3");
  return x;
}

void write_jsonl(std::ostream& out, const Distribution& d, bool decimal) {
  for (const auto& e : d.entries) {
    nlohmann::ordered_json j;
    j["edges"] = e.h.tuples();
    j["prob"] = e.prob.to_string(decimal);
    if (d.mode == Distribution::Mode::kEstimated) j["stderr"] = format_real(e.stderr);
    out << j.dump() << '\n';
  }
}

void write_csv(std::ostream& out, const McSummary& summary) {
  out << "statistic,mean,stderr,count\n";
  for (const auto& s : summary.stats) {
    out << s.name << ',' << format_real(s.mean) << ',' << format_real(s.stderr) << ',' << s.count << '\n';
  }
}

}  // namespace clusterlab
