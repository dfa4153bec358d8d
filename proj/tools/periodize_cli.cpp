// Command-line front end: analyze, simulate, search and reproduce scenarios.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "periodize/config.hpp"
#include "periodize/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitConstraint = 3;

struct Options {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  std::string scenario;
};

nlohmann::json read_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw periodize::SchemaError("$", "cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw periodize::SchemaError("$", std::string("malformed document: ") + e.what());
  }
}

int finish(const periodize::Report& report, const Options& opts) {
  const std::string dir = opts.out_dir.empty() ? report.config.output : opts.out_dir;
  periodize::write_report(report, dir);
  std::cout << periodize::summary_text(report) << "report written to " << dir << "\n";
  const bool infeasible = report.feasibility && !report.feasibility->feasible;
  return report.constraint_violation || infeasible ? kExitConstraint : kExitOk;
}

int run_command(const std::string& command, const Options& opts) {
  using periodize::RunMode;
  if (command == "repro") {
    std::vector<std::string> overrides = opts.overrides;
    if (opts.seed) overrides.push_back("sim.seed=" + std::to_string(*opts.seed));
    return finish(periodize::run_scenario(opts.scenario, overrides), opts);
  }
  if (opts.config_path.empty()) throw periodize::SchemaError("$", "--config is required");
  nlohmann::json doc = read_document(opts.config_path);
  for (const auto& o : opts.overrides) periodize::apply_override(doc, o);
  if (opts.seed) periodize::apply_override(doc, "sim.seed=" + std::to_string(*opts.seed));
  const auto config = periodize::parse_config(doc);
  const RunMode mode = command == "simulate" ? RunMode::Simulate
                       : command == "search" ? RunMode::Search
                                             : RunMode::Analyze;
  return finish(periodize::run(config, mode), opts);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal stochastic training programs for a sluggish agent"};
  app.require_subcommand(1);
  Options opts;

  const auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* config = sub->add_option("--config", opts.config_path, "Experiment config (JSON)");
    if (needs_config) config->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out_dir, "Output directory (overrides the config)");
    sub->add_option("--seed", opts.seed, "Simulation seed");
    sub->add_option("--override", opts.overrides, "key=value override, dotted keys")->take_all();
  };
  add_common(app.add_subcommand("analyze", "Exact long-run statistics"), true);
  add_common(app.add_subcommand("simulate", "Exact statistics plus a seeded simulation"), true);
  add_common(app.add_subcommand("search", "Brute-force search over two-state programs"), true);
  auto* repro = app.add_subcommand("repro", "Run a named reproduction scenario");
  add_common(repro, false);
  repro->add_option("name", opts.scenario, "Scenario name")
      ->required()
      ->check(CLI::IsMember(periodize::scenario_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run_command(command, opts);
  } catch (const periodize::SchemaError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const periodize::ValueError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const periodize::MultipleRecurrentClasses& e) {
    std::cerr << "model constraint violated: " << e.what() << "\n";
    return kExitConstraint;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
