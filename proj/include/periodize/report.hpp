#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "periodize/agent.hpp"
#include "periodize/config.hpp"
#include "periodize/evaluate.hpp"
#include "periodize/trainer.hpp"

namespace periodize {

std::string_view version();

struct SimulationSummary {
  SimConfig config;
  double average_mass = 0.0;
  double average_cost = 0.0;
  Mass min_mass_second_half = 0;
  /// Distances to the exact laws; absent when the joint chain is not unichain.
  std::optional<double> pair_tv_distance;
  std::optional<double> mass_tv_distance;
};

struct Report {
  ExperimentConfig config;
  std::optional<FeasibilityResult> feasibility;
  std::optional<MassStats> stats;
  std::vector<std::pair<std::size_t, Mass>> recurrent_pairs;
  std::optional<double> longrun_cost;
  /// Set when the trainer/agent pair violates the unique-invariant-law constraint.
  std::optional<std::string> constraint_violation;
  std::optional<double> flow_identity_residual;
  std::optional<PeriodicPlan> periodic;
  std::optional<SimulationSummary> simulation;
  std::optional<SearchReport> search;
  /// Scenario-specific quantities.
  nlohmann::json extras = nlohmann::json::object();
  double wall_seconds = 0.0;
};

enum class RunMode { Analyze, Simulate, Search };

/// Runs the exact analysis, plus a simulation (Simulate) or a two-state search
/// (Search) as requested. Constraint violations are recorded, not thrown.
Report run(const ExperimentConfig& config, RunMode mode);

/// Canonical parameterizations of the reproduction scenarios.
std::vector<std::string> scenario_names();
nlohmann::json scenario_document(std::string_view name);

/// Runs a named scenario with "key=value" overrides applied to its document.
Report run_scenario(std::string_view name, const std::vector<std::string>& overrides = {});

nlohmann::json to_json(const Report& report, bool include_wall_clock = true);
std::string summary_text(const Report& report);
/// mass,probability rows, masses ascending.
std::string mass_marginal_csv(const MassStats& stats);
std::string search_table_csv(const SearchReport& search);

/// Writes summary.txt, report.json, mass_marginal.csv and search.csv (when
/// present) into directory.
void write_report(const Report& report, const std::string& directory);

}  // namespace periodize
