#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "clusterlab/cli.hpp"

using namespace clusterlab;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("moments command") {
  auto a = run({"moments", "--n", "5", "--r", "3", "--p", "1/2"});
  CHECK(a.code == 0);
  CHECK(a.out.find("\"lambda\": \"15/32\"") != std::string::npos);
  CHECK(run({"moments", "--n", "4", "--r", "5"}).code == 2);
  auto d = run({"moments", "--n", "10", "--r", "3", "--p", "0.1"});
  CHECK(d.code == 0);
  CHECK(d.out.find("\"xi\": \"0.11\"") != std::string::npos);
  CHECK(d.err.find("warning") != std::string::npos);
  CHECK(run({"moments", "--n", "5", "--r", "3", "--p", "3/2"}).code == 2);
  CHECK(run({"moments", "--n", "5", "--r", "3", "--bogus", "1"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("exactdist command") {
  auto a = run({"exactdist", "--n", "3", "--r", "3", "--p", "1/2"});
  CHECK(a.code == 0);
  CHECK(a.out == "{\"edges\":[],\"prob\":\"7/8\"}\n{\"edges\":[[0,1,2]],\"prob\":\"1/8\"}\n");
  CHECK(run({"exactdist", "--n", "8", "--r", "3", "--p", "1/2"}).code == 2);
  const std::string path = "cli_test_summary.json";
  auto s = run({"exactdist", "--n", "4", "--r", "3", "--p", "1/2", "--summary", path});
  CHECK(s.code == 0);
  std::ifstream f(path);
  std::stringstream text;
  text << f.rdbuf();
  CHECK(text.str().find("\"total\": \"1\"") != std::string::npos);
  CHECK(text.str().find("\"mean_e\": \"1/2\"") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("simulate, factors, shamir and verify commands") {
  auto s1 = run({"simulate", "--n", "10", "--r", "3", "--p", "1/4", "--samples", "200", "--seed", "3",
                 "--workers", "1", "--heavy", "--predicates"});
  auto s2 = run({"simulate", "--n", "10", "--r", "3", "--p", "1/4", "--samples", "200", "--seed", "3",
                 "--workers", "3", "--heavy", "--predicates"});
  CHECK(s1.code == 0);
  CHECK(s1.out == s2.out);
  CHECK(s1.out.rfind("statistic,mean,stderr,count\n", 0) == 0);
  CHECK(s1.out.find("plausible,") != std::string::npos);
  CHECK(run({"simulate", "--n", "10", "--r", "3", "--p", "1/4", "--predicates", "--plaus-delta", "0.3"}).code == 2);

  auto f = run({"factors", "--n", "6", "--r", "3", "--p", "1/2", "--m", "2"});
  CHECK(f.code == 0);
  CHECK(f.out.find("\"E_F_r\": \"5/32\"") != std::string::npos);
  CHECK(f.out.find("\"identity\": \"holds\"") != std::string::npos);
  CHECK(f.out.find("\"ratio_diagnostic\"") != std::string::npos);
  CHECK(run({"factors", "--n", "7", "--r", "3", "--p", "1/2"}).code == 2);

  auto sh = run({"shamir", "--n", "6", "--r", "3", "--seed", "7", "--runs", "200"});
  CHECK(sh.code == 0);
  CHECK(sh.out.rfind("t,gamma,expected_Phi,mean_Phi,se_Phi,mean_alpha,se_alpha\n1,0.1,", 0) == 0);
  CHECK(run({"shamir", "--n", "7", "--r", "3"}).code == 2);

  auto v = run({"verify", "--grid", "small"});
  CHECK(v.code == 0);
  CHECK(v.out.find("FAIL") == std::string::npos);
  CHECK(v.out.find("identities passed (grid small)") != std::string::npos);
  CHECK(run({"verify", "--grid", "huge"}).code == 2);
}

TEST_CASE("config files reject unknown keys") {
  const std::string good = "cli_test_good.toml";
  const std::string bad = "cli_test_bad.toml";
  std::ofstream(good) << "[moments]\nn = 5\nr = 3\np = \"1/2\"\n";
  std::ofstream(bad) << "[moments]\nn = 5\nr = 3\nfrobnicate = 1\n";
  auto a = run({"--config", good, "moments"});
  CHECK(a.code == 0);
  CHECK(a.out.find("\"lambda\": \"15/32\"") != std::string::npos);
  CHECK(run({"--config", bad, "moments"}).code == 2);
  std::remove(good.c_str());
  std::remove(bad.c_str());
}
