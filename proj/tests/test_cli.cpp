#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "priorsense/cli.hpp"
#include "priorsense/io.hpp"

using namespace priorsense;

namespace {
int run(const std::vector<std::string>& args, std::string* out_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  if (out_text) *out_text = out.str();
  return code;
}
}  // namespace

TEST_CASE("experiment parse with defaults") {
  const auto cmd = cli_parse({"experiment", "--case", "poor", "--seed", "42"});
  const auto& e = std::get<ExperimentCommand>(cmd.action);
  REQUIRE(e.configs.size() == 1);
  CHECK(e.configs[0].which == PriorCase::Poor);
  CHECK(e.configs[0].master_seed == 42);
  CHECK(e.configs[0].p_list == ExperimentConfig::defaults(PriorCase::Poor).p_list);
  CHECK(e.configs[0].runs == 2000);
  CHECK(std::get<ExperimentCommand>(cli_parse({"experiment", "--case", "both"}).action).configs.size() == 2);
}

TEST_CASE("oracle parse") {
  const auto cmd = cli_parse({"oracle", "--T", "8", "--alpha", "0.3", "--instance", "thm2:p=0.3"});
  const auto& o = std::get<OracleCommand>(cmd.action);
  CHECK(o.horizon == 8);
  CHECK(o.alpha == 0.3);
  CHECK(o.instance == "thm2:p=0.3");
  std::string text;
  CHECK(run({"oracle", "--T", "8", "--alpha", "0.3", "--instance", "thm2:p=0.3"}, &text) == kExitOk);
  CHECK(text.find("exact_regret=") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK_THROWS_AS(cli_parse({"experiment", "--case", "bad"}), UsageError);
  CHECK_THROWS_AS(cli_parse({"experiment", "--bogus"}), UsageError);
  CHECK_THROWS_AS(cli_parse({}), UsageError);
  CHECK_THROWS_AS(cli_parse({"frobnicate"}), UsageError);
  CHECK_THROWS_AS(cli_parse({"simulate", "--instance", "thm2:p=0.3", "--agent", "ucb"}), UsageError);
  CHECK(run({"experiment", "--case", "bad"}) == kExitUsage);
  CHECK(run({"bound-check", "--kind", "thm2", "--p", "0.7"}) == kExitUsage);
  CHECK(run({"oracle", "--instance", "nonsense"}) == kExitUsage);
  CHECK(run({"--help"}) == kExitOk);
}

TEST_CASE("instance specs") {
  CHECK(parse_instance_spec("thm2:p=0.01", 10000).delta == doctest::Approx(1.0 / std::sqrt(800.0)));
  CHECK(parse_instance_spec("thm3:p=0.5,T=2", 99).delta == doctest::Approx(1.0 / std::sqrt(8.0)));
  const auto g = parse_instance_spec("good:N=5,p=0.999,delta=0.05", 1);
  CHECK(g.space.model_count() == 5);
  CHECK(g.prior[0] == 0.999);
  CHECK_THROWS_AS(parse_instance_spec("thm2:q=1", 10), UsageError);
  CHECK_THROWS_AS(parse_instance_spec("thm2:p=0.3,extra=1", 10), UsageError);
}

TEST_CASE("simulate writes a trajectory") {
  const auto dir = std::filesystem::temp_directory_path() / "priorsense_cli_sim";
  std::filesystem::remove_all(dir);
  CHECK(run({"simulate", "--instance", "thm2:p=0.3", "--T", "50", "--out-dir", dir.string()}) == kExitOk);
  const auto text = read_file((dir / "trajectory.csv").string());
  CHECK(text.rfind("t,action,reward,gap,p_theta1\n", 0) == 0);
  std::string out;
  CHECK(run({"simulate", "--instance", "thm3:p=0.9", "--T", "100", "--runs", "20", "--agent", "exp4"}, &out) ==
        kExitOk);
  CHECK(out.find("mean_regret=") != std::string::npos);
}

TEST_CASE("experiment writes CSV and SVG, identically across thread counts") {
  const auto base = std::filesystem::temp_directory_path() / "priorsense_cli_exp";
  std::filesystem::remove_all(base);
  const std::vector<std::string> common{"experiment", "--case", "poor", "--T", "100", "--runs", "20",
                                        "--N", "2,3", "--p", "0.01,0.1"};
  auto one = common;
  one.insert(one.end(), {"--threads", "1", "--out-dir", (base / "one").string()});
  auto four = common;
  four.insert(four.end(), {"--threads", "4", "--out-dir", (base / "four").string()});
  CHECK(run(one) == kExitOk);
  CHECK(run(four) == kExitOk);
  for (const char* name : {"summary_poor.csv", "fit_poor.csv", "scaling.svg"}) {
    CHECK(read_file((base / "one" / name).string()) == read_file((base / "four" / name).string()));
  }
}

TEST_CASE("config file") {
  const auto dir = std::filesystem::temp_directory_path() / "priorsense_cli_cfg";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "c.json").string();
  write_file(path, R"({"case":"good","N_list":[2],"p_list":[0.99,0.999],"T":50,"runs":5})");
  const auto cmd = cli_parse({"experiment", "--config", path, "--runs", "7"});
  const auto& e = std::get<ExperimentCommand>(cmd.action);
  CHECK(e.configs[0].which == PriorCase::Good);
  CHECK(e.configs[0].runs == 7);
  CHECK(e.configs[0].horizon == 50);
  CHECK_THROWS_AS(cli_parse({"experiment", "--config", path, "--case", "poor"}), UsageError);
}
