#include "clusterlab/moments.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "clusterlab/parallel.hpp"

namespace clusterlab {

namespace {

ExactProb big(const BigInt& z) { return ExactProb(Rational(z)); }

void check_nr(unsigned n, unsigned r) {
  if (r < 3 || r > n) throw std::invalid_argument("need 3 <= r <= n");
  if (n > kMaxVertices) throw std::invalid_argument("n above 64");
}

void check_open_unit(const Rational& p) {
  if (sgn(p) <= 0 || p >= 1) throw std::invalid_argument("need 0 < p < 1");
}

void check_divides(unsigned n, unsigned r) {
  if (r == 0 || n % r != 0) throw std::invalid_argument("r must divide n");
}

std::string render(const ExactProb& x, bool decimal) { return x.to_string(decimal); }

}  // namespace

ExactProb clique_mean(unsigned n, unsigned k, const Rational& p) {
  return big(binomial(n, k)) * ExactProb(p).pow(pairs_in(k));
}

MomentTable moment_table(unsigned n, unsigned r, const Rational& p_in, bool decimal) {
  check_nr(n, r);
  check_open_unit(p_in);
  MomentTable t;
  t.n = n;
  t.r = r;
  t.p = ExactProb(p_in);
  t.decimal = decimal;
  t.N = binomial(n, r);
  const long er = pairs_in(r);
  t.pi = t.p.pow(er);
  t.mu_r = big(t.N) * t.pi;

  const ExactProb half(Rational(1, 2));
  const ExactProb pi_sq = t.p.pow(2 * er);
  for (unsigned k = 0; k < r; ++k) {
    const ExactProb pairs = big(t.N * binomial(r, k) * binomial(n - r, r - k));
    t.nu.push_back(half * pairs * t.p.pow(2 * er - pairs_in(k)));
    t.nu0.push_back(half * pairs * pi_sq);
  }
  for (unsigned k = 2; k < r; ++k) {
    t.delta2 += t.nu[k];
    t.delta2_0 += t.nu0[k];
  }
  // Λ directly: ½ Σ_s C(n,r) C(r,s) C(n-r,r-s) p^{2C(r,2)} (p^{-C(s,2)} - 1).
  for (unsigned s = 2; s < r; ++s) {
    const ExactProb pairs = big(t.N * binomial(r, s) * binomial(n - r, r - s));
    const ExactProb term = half * pairs * pi_sq * (t.p.pow(-static_cast<long>(pairs_in(s))) - ExactProb(1));
    t.lambda += term;
    if (s == 2) t.lambda_prime = term;
  }
  t.phi = phi_value(n, r, p_in);
  t.mu_next = r + 1 <= n ? clique_mean(n, r + 1, p_in) : ExactProb(0);
  const ExactProb nn(static_cast<long>(n));
  if (r == 3) {
    const ExactProb a = nn.pow(5) * t.p.pow(7);
    t.xi_parts = {a, a.sqrt()};
  } else if (r == 4) {
    t.xi_parts = {nn.pow(3) * t.p.pow(6), nn.pow(8) * t.p.pow(16)};
  }
  if (t.xi_parts.empty()) {
    t.xi = t.mu_next;
  } else {
    t.xi = t.xi_parts[0] + t.xi_parts[1];
  }
  const double logn = std::log(static_cast<double>(n));
  t.q_r = std::pow(std::tgamma(static_cast<double>(r)) * logn, 1.0 / static_cast<double>(er)) *
          std::pow(static_cast<double>(n), -2.0 / static_cast<double>(r));
  t.m_r = static_cast<double>(n) * logn / static_cast<double>(r);
  t.pi_r = t.m_r / t.N.get_d();
  if (n % r == 0) t.sigma_npi = sigma_npi(n, r, t.pi);
  return t;
}

nlohmann::ordered_json to_json(const MomentTable& t) {
  const bool d = t.decimal;
  nlohmann::ordered_json j;
  j["n"] = std::to_string(t.n);
  j["r"] = std::to_string(t.r);
  j["p"] = render(t.p, d);
  j["N"] = t.N.get_str();
  j["pi"] = render(t.pi, d);
  j["mu_r"] = render(t.mu_r, d);
  nlohmann::ordered_json nu = nlohmann::ordered_json::object();
  nlohmann::ordered_json nu0 = nlohmann::ordered_json::object();
  for (unsigned k = 0; k < t.r; ++k) {
    nu[std::to_string(k)] = render(t.nu[k], d);
    nu0[std::to_string(k)] = render(t.nu0[k], d);
  }
  j["nu"] = nu;
  j["nu0"] = nu0;
  j["delta2"] = render(t.delta2, d);
  j["delta2_0"] = render(t.delta2_0, d);
  j["lambda"] = render(t.lambda, d);
  j["lambda_prime"] = render(t.lambda_prime, d);
  j["phi"] = render(t.phi, d);
  j["xi"] = render(t.xi, d);
  if (t.r == 3) {
    j["xi_n5p7"] = render(t.xi_parts[0], d);
    j["xi_sqrt_n5p7"] = render(t.xi_parts[1], d);
  } else if (t.r == 4) {
    j["xi_n3p6"] = render(t.xi_parts[0], d);
    j["xi_n8p16"] = render(t.xi_parts[1], d);
  }
  j["mu_next"] = render(t.mu_next, d);
  j["q_r"] = format_real(t.q_r);
  j["m_r"] = format_real(t.m_r);
  j["pi_r"] = format_real(t.pi_r);
  if (t.sigma_npi) j["sigma_npi"] = render(*t.sigma_npi, d);
  return j;
}

ExactProb phi_value(unsigned n, unsigned r, const Rational& p) {
  check_nr(n, r);
  return ExactProb(p).pow(r - 1);
}

ExactProb phi_brute_force(unsigned n, unsigned r, const Rational& p) {
  check_nr(n, r);
  const auto count = choose_u64(n, r);
  check_guard(count <= 4000, "phi_brute_force: too many r-sets");
  std::vector<VertexMask> sets;
  for (std::uint64_t i = 0; i < count; ++i) sets.push_back(unrank_rset(i, n, r));
  ExactProb best(0);
  for (auto a : sets) {
    for (auto b : sets) {
      if (a == b) continue;
      const VertexMask both[] = {a, b};
      const auto fresh = static_cast<long>(covered_pairs(both, 2) - pairs_in(r));
      const ExactProb cand = ExactProb(p).pow(fresh);
      if (cand > best) best = cand;
    }
  }
  return best;
}

std::vector<std::vector<std::uint32_t>> complete_overlap_graph(unsigned n, unsigned r) {
  const auto count = choose_u64(n, r);
  std::vector<std::vector<std::uint32_t>> adj(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    for_each_overlapping_rset(unrank_rset(i, n, r), n, r, [&](VertexMask t, unsigned) {
      adj[i].push_back(static_cast<std::uint32_t>(rank_rset(t, n, r)));
    });
    std::sort(adj[i].begin(), adj[i].end());
  }
  return adj;
}

PowerSum delta_k_terms(unsigned n, unsigned r, unsigned k, unsigned workers) {
  check_nr(n, r);
  if (k < 2) throw std::invalid_argument("delta_k needs k >= 2");
  check_guard(k <= 4, "delta_k: k above 4");
  const auto count = choose_u64(n, r);
  check_guard(count <= 4000, "delta_k: C(n,r) above 4000");
  const auto adj = complete_overlap_graph(n, r);
  // Rough size of the search: N · degree^(k-1).
  const double estimate = static_cast<double>(count) *
                          std::pow(static_cast<double>(adj.empty() ? 0 : adj[0].size()), k - 1);
  check_guard(estimate <= 2e9, "delta_k: enumeration too large");
  std::vector<VertexMask> sets(count);
  for (std::uint64_t i = 0; i < count; ++i) sets[i] = unrank_rset(i, n, r);
  std::vector<PowerSum> per_root(count);
  parallel_tasks(count, workers, [&](std::size_t root, unsigned) {
    std::vector<VertexMask> chosen;
    for_each_connected_subset(adj, k, root, root + 1, [&](const std::vector<std::uint32_t>& s) {
      chosen.clear();
      for (auto x : s) chosen.push_back(sets[x]);
      per_root[root].add(static_cast<unsigned>(covered_pairs(chosen)));
    });
  });
  PowerSum total;
  for (const auto& part : per_root) total += part;
  return total;
}

ExactProb delta_k_exact(unsigned n, unsigned r, const Rational& p, unsigned k, unsigned workers) {
  return delta_k_terms(n, r, k, workers).eval(ExactProb(p));
}

BigInt matching_count_complete(unsigned n, unsigned r) {
  check_divides(n, r);
  const unsigned k = n / r;
  BigInt den = factorial(k);
  for (unsigned i = 0; i < k; ++i) den *= factorial(r);
  return factorial(n) / den;
}

ExactProb sigma_nm(unsigned n, unsigned r, const BigInt& m) {
  check_divides(n, r);
  const BigInt N = binomial(n, r);
  if (sgn(m) < 0 || m > N) throw std::invalid_argument("need 0 <= m <= N");
  const unsigned k = n / r;
  return ExactProb(Rational(matching_count_complete(n, r) * falling_factorial(m, k), falling_factorial(N, k)));
}

ExactProb sigma_npi(unsigned n, unsigned r, const ExactProb& pi) {
  return big(matching_count_complete(n, r)) * pi.pow(n / r);
}

SigmaRatio ratio_sigma(unsigned n, unsigned r, const BigInt& m) {
  check_divides(n, r);
  const BigInt N = binomial(n, r);
  const unsigned k = n / r;
  if (m < k || m > N) throw std::invalid_argument("need n/r <= m <= N so that Σ(n,m) > 0");
  SigmaRatio out;
  const ExactProb pi(Rational(m, N));
  out.exact = sigma_npi(n, r, pi) / sigma_nm(n, r, m);
  out.leading_approx = std::exp(static_cast<double>(n) * n / (2.0 * r * r * m.get_d()));
  return out;
}

}  // namespace clusterlab
