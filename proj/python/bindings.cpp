#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "clusterlab/cli.hpp"
#include "clusterlab/cluster_stats.hpp"
#include "clusterlab/distribution_lab.hpp"
#include "clusterlab/factor_lab.hpp"
#include "clusterlab/moments.hpp"
#include "clusterlab/parallel.hpp"

namespace py = pybind11;
using namespace clusterlab;

namespace {

using Tuples = std::vector<std::vector<std::uint32_t>>;

// Big integers cross the boundary as Python ints via their decimal string.
py::object to_int(const BigInt& z) { return py::int_(py::str(z.get_str())); }

LabeledGraph graph_of(unsigned n, const std::vector<std::pair<unsigned, unsigned>>& edges) {
  LabeledGraph g(n);
  for (auto [u, v] : edges) g.add_edge(u, v);
  return g;
}

std::string moment_table_json(unsigned n, unsigned r, const std::string& p) {
  const auto in = parse_probability(p);
  return to_json(moment_table(n, r, in.value, in.from_decimal)).dump();
}

std::vector<std::pair<Tuples, std::string>> exact_law(unsigned n, unsigned r, const std::string& p, unsigned workers) {
  const auto d = exact_distribution(n, r, parse_probability(p).value, {.workers = workers});
  std::vector<std::pair<Tuples, std::string>> out;
  out.reserve(d.entries.size());
  for (const auto& e : d.entries) out.emplace_back(e.h.tuples(), e.prob.to_string());
  return out;
}

py::dict shamir_summary(unsigned n, unsigned r, std::uint64_t seed, std::uint64_t runs, std::uint64_t stop_m,
                        unsigned workers) {
  const auto s = run_shamir(n, r, seed, runs, stop_m, workers);
  std::vector<std::string> gamma, expected;
  for (const auto& g : s.gamma) gamma.push_back(g.get_str());
  for (const auto& e : s.expected_phi) expected.push_back(e.get_str());
  py::dict d;
  d["N"] = s.N;
  d["phi0"] = s.phi0;
  d["gamma"] = gamma;
  d["expected_phi"] = expected;
  d["mean_phi"] = s.mean_phi;
  d["se_phi"] = s.se_phi;
  d["mean_alpha"] = s.mean_alpha;
  d["se_alpha"] = s.se_alpha;
  d["recursion_failures"] = s.recursion_failures;
  d["monotonicity_failures"] = s.monotonicity_failures;
  return d;
}

py::tuple cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code;
  {
    py::gil_scoped_release release;
    code = run_cli(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Clique-hypergraph statistics of G(n, p)";
  py::register_exception<GuardExceeded>(m, "GuardExceeded", PyExc_ValueError);

  m.def("moment_table_json", &moment_table_json, py::arg("n"), py::arg("r"), py::arg("p") = "1/2");
  m.def("exact_distribution", &exact_law, py::arg("n"), py::arg("r"), py::arg("p"), py::arg("workers") = 1,
        "List of (hyperedges, probability) pairs; probabilities are exact \"a/b\" strings.");
  m.def(
      "clique_hypergraph",
      [](unsigned n, const std::vector<std::pair<unsigned, unsigned>>& edges, unsigned r) {
        return clique_hypergraph(graph_of(n, edges), r).tuples();
      },
      py::arg("n"), py::arg("edges"), py::arg("r"));
  m.def(
      "t_of", [](unsigned n, unsigned r, const Tuples& h) { return t_counts(RUniformHypergraph::from_tuples(n, r, h), 2).t_total; },
      py::arg("n"), py::arg("r"), py::arg("hyperedges"));
  m.def(
      "count_factors",
      [](unsigned n, const std::vector<std::pair<unsigned, unsigned>>& edges, unsigned r) {
        return to_int(count_factors(graph_of(n, edges), r));
      },
      py::arg("n"), py::arg("edges"), py::arg("r"));
  m.def(
      "count_matchings",
      [](unsigned n, unsigned r, const Tuples& h) { return to_int(count_matchings(RUniformHypergraph::from_tuples(n, r, h))); },
      py::arg("n"), py::arg("r"), py::arg("hyperedges"));
  m.def("shamir", &shamir_summary, py::arg("n"), py::arg("r"), py::arg("seed") = 0, py::arg("runs") = 1000,
        py::arg("stop_m") = 0, py::arg("workers") = 1);
  m.def("run_cli", &cli, py::arg("args"), "Runs a command line; returns (exit_code, stdout, stderr).");
}
