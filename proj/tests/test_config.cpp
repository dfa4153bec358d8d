#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "periodize/config.hpp"
#include "periodize/report.hpp"

using namespace periodize;
using nlohmann::json;

namespace {

std::string schema_path(const std::string& text) {
  try {
    parse_config(std::string_view(text));
  } catch (const SchemaError& e) {
    return e.path();
  }
  return "<no error>";
}

std::string value_error(const std::string& text) {
  try {
    parse_config(std::string_view(text));
  } catch (const ValueError& e) {
    return e.what();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const auto config = parse_config(std::string_view(
      R"({"mu": 3, "c": 0.4, "trainer": {"type": "prop1"}, "agent": "myopic"})"));
  CHECK(config.params.mu == 3);
  CHECK(config.params.c == 0.4);
  CHECK(config.params.epsilon == 0.01);
  CHECK(config.params.delta == 0.999);
  CHECK(config.agent == AgentKind::Myopic);
  CHECK(std::holds_alternative<trainer_spec::Prop1>(*config.trainer));
  CHECK_FALSE(config.sim);

  const auto with_sim = parse_config(std::string_view(
      R"({"mu": 2, "c": 0.25, "trainer": {"type": "prop2"}, "sim": {}})"));
  CHECK(std::get<trainer_spec::Prop2>(*with_sim.trainer).margin == 0.001);
  CHECK(with_sim.sim->periods == 1'000'000);
  CHECK(with_sim.sim->seed == 0);
  CHECK(with_sim.sim->m0 == 0);
}

TEST_CASE("value errors name the violated invariant") {
  CHECK(value_error(R"({"mu": 2, "c": 0.3, "trainer": {"type": "prop2"}})").find("NonIntegerRatio") !=
        std::string::npos);
  CHECK(value_error(R"({"mu": 2, "c": 0.25, "epsilon": 0.01, "trainer": {"type": "prop2", "margin": 0.01}})")
            .find("InfeasibleMargin") != std::string::npos);
  CHECK(value_error(R"({"mu": 0, "c": 0.25, "trainer": {"type": "prop1"}})").find("mu") != std::string::npos);
  CHECK(value_error(R"({"mu": 1, "c": 1.5, "trainer": {"type": "prop1"}})").find("c must") != std::string::npos);
  CHECK(value_error(R"({"mu": 1, "c": 0.5, "trainer": {"type": "matrix", "transitions": [[1,0],[0,1]], "intensity": [0,1]}})")
            .find("unichain") != std::string::npos);
}

TEST_CASE("schema errors carry the key path") {
  CHECK(schema_path(R"({"c": 0.4, "trainer": {"type": "prop1"}})") == "mu");
  CHECK(schema_path(R"({"mu": 3, "c": "high", "trainer": {"type": "prop1"}})") == "c");
  CHECK(schema_path(R"({"mu": 3, "c": 0.4, "trainer": {"type": "prop1", "beta": 1}})") == "trainer.beta");
  CHECK(schema_path(R"({"mu": 3, "c": 0.4, "trainer": {"type": "cycle", "sequence": [1, "x"]}})") ==
        "trainer.sequence[1]");
  CHECK(schema_path(R"({"mu": 3, "c": 0.4, "trainer": {"type": "warp"}})") == "trainer.type");
  CHECK(schema_path(R"({"mu": 3, "c": 0.4})") == "trainer");
  CHECK(schema_path(R"({"mu": 3, "c": 0.4, "trainer": {"type": "prop1"}, "sim": {"steps": 4}})") == "sim.steps");
  CHECK(schema_path("{not json") == "$");
}

TEST_CASE("echoed config re-parses to an equal config") {
  const std::vector<std::string> documents{
      R"({"mu": 3, "c": 0.4, "trainer": {"type": "prop1"}, "agent": "myopic"})",
      R"({"mu": 2, "c": 0.25, "trainer": {"type": "prop2", "margin": 0.0005}, "sim": {"T": 10, "seed": 3}})",
      R"({"mu": 4, "c": 0.3626, "trainer": {"type": "cycle", "sequence": [11, 0, 0]}, "agent": {"kind": "patient", "delta": 0.99}})",
      R"({"mu": 2, "c": 0.5, "trainer": {"type": "two_state", "d_low": 0, "d_high": 3, "alpha": 0.3, "beta": 0.7}})",
      R"({"mu": 2, "c": 0.5, "trainer": {"type": "matrix", "transitions": [[0.1, 0.9], [1, 0]], "intensity": [0, 3]}})",
      R"({"mu": 2, "c": 0.25, "agent": "myopic", "search": {"d_max": 5, "probabilities": [0.5, 1]}})",
      R"({"mu": 3, "c": 0.1, "trainer": {"type": "constant", "intensity": 2}, "output": "x/y"})"};
  for (const auto& text : documents) {
    const auto config = parse_config(std::string_view(text));
    const auto echoed = to_json(config);
    CHECK(parse_config(echoed) == config);
    CHECK(parse_config(std::string_view(echoed.dump())) == config);
  }
}

TEST_CASE("overrides") {
  json doc = scenario_document("prop2");
  apply_override(doc, "trainer.margin=0.0005");
  apply_override(doc, "agent=myopic");
  apply_override(doc, "sim.seed=12");
  const auto config = parse_config(doc);
  CHECK(std::get<trainer_spec::Prop2>(*config.trainer).margin == 0.0005);
  CHECK(config.agent == AgentKind::Myopic);
  CHECK(config.sim->seed == 12);
  CHECK_THROWS_AS(apply_override(doc, "novalue"), SchemaError);
}

TEST_CASE("scenarios") {
  const Report prop1 = run_scenario("prop1");
  CHECK(prop1.stats->min_mass == 5);
  CHECK(*prop1.simulation->mass_tv_distance < 0.01);
  CHECK(*prop1.flow_identity_residual < 1e-9);

  const Report prop2 = run_scenario("prop2");
  CHECK(prop2.stats->min_mass == 7);
  CHECK(std::abs(prop2.stats->average_mass - 7.251) < 1e-9);

  const Report flexible = run_scenario("flexible-benchmark");
  CHECK(flexible.stats->min_mass == 3);
  CHECK(flexible.stats->max_mass == 3);

  const Report cycle = run_scenario("cycle-counterexample");
  REQUIRE(cycle.periodic);
  CHECK(cycle.periodic->min_mass() <= 9);
  CHECK(cycle.extras["stochastic_contrast"]["min_mass"].get<int>() == 10);

  CHECK_THROWS_AS(run_scenario("nonesuch"), SchemaError);
}

TEST_CASE("identical config and seed give identical reports") {
  const auto config = parse_config(std::string_view(
      R"({"mu": 2, "c": 0.25, "trainer": {"type": "two_state", "d_low": 0, "d_high": 5, "alpha": 0.6, "beta": 0.9},
          "agent": "patient", "sim": {"T": 20000, "seed": 5}})"));
  const Report a = run(config, RunMode::Simulate);
  const Report b = run(config, RunMode::Simulate);
  CHECK(to_json(a, false).dump(2) == to_json(b, false).dump(2));
  CHECK(summary_text(a) == summary_text(b));
  CHECK(mass_marginal_csv(*a.stats) == mass_marginal_csv(*b.stats));
  CHECK(parse_config(to_json(a)["config"]) == config);
}

TEST_CASE("report files") {
  const Report report = run_scenario("prop2");
  const std::string csv = mass_marginal_csv(*report.stats);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "mass,probability");
  int previous = -1;
  while (std::getline(lines, line)) {
    const int mass = std::stoi(line.substr(0, line.find(',')));
    CHECK(mass == previous + 1);
    previous = mass;
  }
  CHECK(previous == 8);

  const auto dir = std::filesystem::temp_directory_path() / "periodize_report_test";
  std::filesystem::remove_all(dir);
  write_report(report, dir.string());
  CHECK(std::filesystem::exists(dir / "summary.txt"));
  CHECK(std::filesystem::exists(dir / "mass_marginal.csv"));
  std::ifstream in(dir / "report.json");
  const json doc = json::parse(in);
  CHECK(doc["mass_stats"]["min_mass"] == 7);
  CHECK(doc.contains("wall_seconds"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("constraint violations are recorded, not thrown") {
  const auto config = parse_config(std::string_view(
      R"({"mu": 2, "c": 0.25, "trainer": {"type": "two_state", "d_low": 0, "d_high": 4, "alpha": 1, "beta": 1}, "agent": "myopic"})"));
  const Report report = run(config, RunMode::Analyze);
  CHECK(report.constraint_violation);
  CHECK_FALSE(report.stats);
}
