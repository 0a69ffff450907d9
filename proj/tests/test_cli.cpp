#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "cli.hpp"

using namespace distexp;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

/// CSV lines that are neither comments nor the header.
std::vector<std::string> data_rows(const std::string& csv) {
  std::vector<std::string> rows;
  bool header = true;
  for (const auto& l : lines_of(csv)) {
    if (l.empty() || l[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    rows.push_back(l);
  }
  return rows;
}

std::string header_of(const std::string& csv) {
  for (const auto& l : lines_of(csv)) {
    if (!l.empty() && l[0] != '#') return l;
  }
  return {};
}

const std::vector<std::string> kSmallRun = {"run", "--algorithm", "dfpl", "--adversary", "markov",
                                            "--T", "2000", "--k", "4"};

std::vector<std::string> with(std::vector<std::string> base, std::vector<std::string> extra) {
  base.insert(base.end(), extra.begin(), extra.end());
  return base;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "distexp_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("run writes one row per seed after the schema line") {
  const auto r = invoke(with(kSmallRun, {"--seeds", "1"}));
  REQUIRE(r.code == 0);
  CHECK(lines_of(r.out).front() == cli::kCsvSchema);
  CHECK(header_of(r.out) == cli::kRunHeader);
  const auto rows = data_rows(r.out);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].rfind("dfpl,markov:lambda=20,epsilon=0.1,2000,4,2,1,", 0) == 0);
  CHECK(r.out.find("# T=2000") != std::string::npos);
}

TEST_CASE("rerunning a configuration is byte-identical") {
  const auto a = invoke(with(kSmallRun, {"--seeds", "5"}));
  const auto b = invoke(with(kSmallRun, {"--seeds", "5", "--threads", "3"}));
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(data_rows(a.out).size() == 5);
}

TEST_CASE("configuration errors exit with 2 and name the field") {
  auto r = invoke({"run", "--adversary", "markov", "--seeds", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("algorithm") != std::string::npos);

  r = invoke(with(kSmallRun, {"--epsilon", "0.5"}));
  CHECK(r.code == 2);
  CHECK(r.err.find("epsilon") != std::string::npos);

  r = invoke({"run", "--bogus"});
  CHECK(r.code == 2);

  r = invoke({"run", "--algorithm", "dfpl", "--adversary", "appendix_d", "--T", "20", "--k", "2"});
  CHECK(r.code == 2);
  CHECK(r.err.find("nearest") != std::string::npos);

  CHECK(invoke({"figure", "fig_z"}).code == 2);
  CHECK(invoke({}).code == 2);
}

TEST_CASE("help exits cleanly") {
  const auto r = invoke({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("sweep") != std::string::npos);
}

TEST_CASE("sweep crosses values with seeds") {
  const auto r = invoke(with({"sweep", "--param", "epsilon", "--values", "0.05,0.1,0.15"},
                             {"--algorithm", "dfpl", "--adversary", "zigzag", "--T", "2000",
                              "--k", "4", "--seeds", "3"}));
  REQUIRE(r.code == 0);
  CHECK(header_of(r.out) == std::string("sweep_param,sweep_value,") + cli::kRunHeader);
  const auto rows = data_rows(r.out);
  CHECK(rows.size() == 9);
  CHECK(rows[0].rfind("epsilon,0.05,dfpl,", 0) == 0);
  CHECK(rows[8].rfind("epsilon,0.15,dfpl,", 0) == 0);

  const auto lam = invoke({"sweep", "--param", "lambda", "--values", "5,20", "--algorithm",
                           "full", "--adversary", "markov", "--T", "500", "--k", "2", "--seeds",
                           "2"});
  REQUIRE(lam.code == 0);
  CHECK(data_rows(lam.out)[2].find("markov:lambda=20") != std::string::npos);

  CHECK(invoke({"sweep", "--param", "gamma", "--values", "1", "--algorithm", "dfpl",
                "--adversary", "zigzag"}).code == 2);
  CHECK(invoke({"sweep", "--param", "epsilon", "--values", "", "--algorithm", "dfpl",
                "--adversary", "zigzag"}).code == 2);
}

TEST_CASE("fig_a at small scale") {
  const auto r = invoke({"figure", "fig_a", "--T", "1000", "--k", "4", "--seeds", "2",
                         "--lambda", "1,20"});
  REQUIRE(r.code == 0);
  CHECK(header_of(r.out) ==
        "algo,params,lambda,T,k,n,seeds,mean_regret,std_regret,mean_messages,std_messages");
  const auto rows = data_rows(r.out);
  CHECK(rows.size() == 5 * 2);
  CHECK(rows[0].rfind("full,", 0) == 0);
  CHECK(rows[9].rfind("dfpl,", 0) == 0);
}

TEST_CASE("fig_b at small scale") {
  const auto r = invoke({"figure", "fig_b", "--T", "1000", "--k", "4", "--seeds", "2", "--mu",
                         "10,50", "--lambda", "20"});
  REQUIRE(r.code == 0);
  CHECK(header_of(r.out) == "algo,params,T,k,n,seeds,worst_regret,worst_messages");
  const auto rows = data_rows(r.out);
  CHECK(rows.size() == 9);
  CHECK(rows[8].rfind("counter,beta=64,", 0) == 0);
}

TEST_CASE("config files round-trip through the effective settings") {
  const auto path = scratch("roundtrip.cfg");
  {
    std::ofstream f(path);
    f << "# comment\n\nalgorithm=minibatch\np_sync=0.02\nadversary=zigzag\nmu=40\nT=1500\n"
         "k=3\nseeds=2\n";
  }
  const auto a = invoke({"run", "--config", path.string()});
  REQUIRE(a.code == 0);
  CHECK(data_rows(a.out)[0].rfind("minibatch,zigzag:mu=40,p_sync=0.02,1500,3,", 0) == 0);

  // The echoed preamble is itself a config.
  const auto echoed = scratch("echoed.cfg");
  {
    std::ofstream f(echoed);
    for (const auto& l : lines_of(a.out)) {
      if (l.rfind("# ", 0) == 0 && l.find('=') != std::string::npos) f << l.substr(2) << '\n';
    }
  }
  const auto b = invoke({"run", "--config", echoed.string()});
  REQUIRE(b.code == 0);
  CHECK(a.out == b.out);

  const auto c = invoke({"run", "--config", path.string(), "--seeds", "1"});
  CHECK(data_rows(c.out).size() == 1);

  const auto bad = scratch("bad.cfg");
  {
    std::ofstream f(bad);
    f << "algorithm=dfpl\nspeed=3\n";
  }
  const auto r = invoke({"run", "--config", bad.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find(":2") != std::string::npos);
  CHECK(invoke({"run", "--config", scratch("missing.cfg").string()}).code == 2);
}

TEST_CASE("settings parser") {
  const auto s = cli::parse_settings("T=5\n# x\n k = 4 \nT=6\n");
  CHECK(s.at("T") == "6");
  CHECK(s.at("k") == "4");
  CHECK_THROWS_AS(cli::parse_settings("T 5\n"), ConfigurationError);
  CHECK_THROWS_AS(cli::parse_settings("colour=red\n"), ConfigurationError);
  CHECK(cli::known_key("jitter_slack"));
  CHECK_FALSE(cli::known_key("colour"));
}

TEST_CASE("file output puts the summary on stdout") {
  const auto path = scratch("rows.csv");
  const auto r = invoke(with(kSmallRun, {"--seeds", "2", "--out", path.string()}));
  REQUIRE(r.code == 0);
  std::ifstream f(path);
  std::stringstream body;
  body << f.rdbuf();
  CHECK(data_rows(body.str()).size() == 2);
  CHECK(r.out.find(cli::kCsvSchema) == std::string::npos);
  CHECK_FALSE(r.out.empty());
}

TEST_CASE("DISTEXP_THREADS is the thread fallback") {
  const auto base = invoke(with(kSmallRun, {"--seeds", "4"}));
  ::setenv("DISTEXP_THREADS", "3", 1);
  const auto env = invoke(with(kSmallRun, {"--seeds", "4"}));
  ::setenv("DISTEXP_THREADS", "", 1);
  const auto empty = invoke(with(kSmallRun, {"--seeds", "4"}));
  ::setenv("DISTEXP_THREADS", "lots", 1);
  const auto bad = invoke(with(kSmallRun, {"--seeds", "4"}));
  const auto flag = invoke(with(kSmallRun, {"--seeds", "4", "--threads", "1"}));
  ::unsetenv("DISTEXP_THREADS");
  CHECK(env.code == 0);
  CHECK(env.out == base.out);
  CHECK(empty.code == 0);
  CHECK(bad.code == 2);
  CHECK(bad.err.find("DISTEXP_THREADS") != std::string::npos);
  CHECK(flag.code == 0);
}

}  // TEST_SUITE
