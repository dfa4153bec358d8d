#include "periodize/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifndef PERIODIZE_VERSION
#define PERIODIZE_VERSION "dev"
#endif

namespace periodize {

using nlohmann::json;

std::string_view version() { return PERIODIZE_VERSION; }

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v, int digits = 6) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

SimulationSummary summarize(const SimulationPath& path, const SimConfig& config,
                            const std::optional<ExtendedChain>& chain,
                            const std::optional<MassStats>& stats) {
  SimulationSummary summary;
  summary.config = config;
  summary.average_mass = path.average_mass();
  summary.average_cost = path.average_cost();
  summary.min_mass_second_half = path.records.back().mass;
  for (std::size_t t = path.records.size() / 2; t < path.records.size(); ++t)
    summary.min_mass_second_half = std::min(summary.min_mass_second_half, path.records[t].mass);
  if (chain) summary.pair_tv_distance = simulation_tv_distance(path, *chain);
  if (stats) summary.mass_tv_distance = mass_tv_distance(path, *stats);
  return summary;
}

void add_cycle_extras(Report& report) {
  const auto* cycle = std::get_if<trainer_spec::Cycle>(&*report.config.trainer);
  if (!cycle || !report.periodic) return;
  const auto& seq = cycle->sequence;
  const Intensity high = *std::max_element(seq.begin(), seq.end());
  if (high < 1) return;
  // The reply the stochastic two-state program sustains: top mass on high
  // phases, one below it otherwise.
  std::vector<Mass> tracking;
  for (Intensity d : seq) tracking.push_back(d == high ? high : high - 1);
  const double c = report.config.params.c;
  const double tracking_cost = cycle_plan_cost(seq, tracking, c);
  const double high_weight =
      static_cast<double>(std::count(seq.begin(), seq.end(), high)) / static_cast<double>(seq.size());
  auto& extras = report.extras;
  extras["tracking_plan"] = tracking;
  extras["tracking_cycle_cost"] = tracking_cost;
  extras["best_reply_cycle_cost"] = report.periodic->cycle_cost();
  extras["saving_per_cycle"] = tracking_cost - report.periodic->cycle_cost();

  if (high_weight > c && high_weight < 1.0) {
    ModelParams params = report.config.params;
    const TrainerPolicy stochastic = persistence_spec(high, c, high_weight).to_policy();
    const ExtendedChain chain = build_extended_chain(stochastic, solve_agent_mdp(stochastic, params));
    const MassStats stats = mass_stats(chain);
    extras["stochastic_contrast"] = {{"high_weight", high_weight},
                                     {"min_mass", stats.min_mass},
                                     {"max_mass", stats.max_mass},
                                     {"average_mass", stats.average_mass}};
  }
}

}  // namespace

Report run(const ExperimentConfig& config, RunMode mode) {
  const auto start = std::chrono::steady_clock::now();
  Report report;
  report.config = config;

  std::optional<ExtendedChain> chain;
  std::optional<TrainerPolicy> trainer;
  std::optional<AgentPolicy> agent;
  if (config.trainer) {
    trainer = build_trainer(config);
    report.feasibility = feasibility_check(*trainer, config.params);
    agent = config.agent == AgentKind::Myopic ? myopic_policy(*trainer)
                                              : solve_agent_mdp(*trainer, config.params);
    try {
      chain = build_extended_chain(*trainer, *agent);
      report.stats = mass_stats(*chain);
      report.recurrent_pairs = chain->recurrent_pairs();
      report.longrun_cost = agent_longrun_cost(*trainer, *agent, config.params);
      if (config.agent == AgentKind::Myopic) report.flow_identity_residual = flow_identity_residual(*chain);
    } catch (const MultipleRecurrentClasses& e) {
      report.constraint_violation = e.what();
    }
    if (config.agent == AgentKind::Patient)
      if (const auto* cycle = std::get_if<trainer_spec::Cycle>(&*config.trainer)) {
        report.periodic = cyclic_best_reply(cycle->sequence, config.params);
        add_cycle_extras(report);
      }
  }

  if (mode == RunMode::Simulate) {
    if (!trainer) throw SchemaError("trainer", "required for simulation");
    const SimConfig sim = config.sim.value_or(SimConfig{});
    const SimulationPath path = simulate(*trainer, *agent, sim.m0, sim.periods, sim.seed, config.params.c);
    report.simulation = summarize(path, sim, chain, report.stats);
  }

  if (mode == RunMode::Search) {
    SearchConfig search;
    if (config.search) {
      search = *config.search;
    } else {
      search.intensities = default_intensity_grid(config.params, config.agent);
      search.probabilities = default_probability_grid();
    }
    SearchOptions options{search.intensities, search.probabilities};
    options.alpha_one_only = search.alpha_one_only;
    options.threads = search.threads;
    report.search = search_two_state(config.params, config.agent, options);
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<std::string> scenario_names() {
  return {"prop1", "prop2", "cycle-counterexample", "flexible-benchmark"};
}

json scenario_document(std::string_view name) {
  if (name == "prop1")
    return {{"mu", 3}, {"c", 0.5}, {"epsilon", 0.0005}, {"trainer", {{"type", "prop1"}}},
            {"agent", "myopic"}, {"sim", {{"T", 1000000}, {"seed", 0}, {"m0", 0}}},
            {"output", "out/prop1"}};
  if (name == "prop2")
    return {{"mu", 2}, {"c", 0.25}, {"delta", 0.999}, {"epsilon", 0.01},
            {"trainer", {{"type", "prop2"}, {"margin", 0.001}}}, {"agent", "patient"},
            {"output", "out/prop2"}};
  if (name == "cycle-counterexample")
    return {{"mu", 4}, {"c", 4.0 / 11.0 - 0.001}, {"delta", 0.999}, {"epsilon", 0.01},
            {"trainer", {{"type", "cycle"}, {"sequence", {11, 11, 11, 11, 0, 0, 0, 0, 0, 0, 0}}}},
            {"agent", "patient"}, {"output", "out/cycle-counterexample"}};
  if (name == "flexible-benchmark")
    return {{"mu", 3}, {"c", 0.5}, {"trainer", {{"type", "constant"}}}, {"agent", "patient"},
            {"output", "out/flexible-benchmark"}};
  throw SchemaError("scenario", "unknown scenario '" + std::string(name) + "'");
}

Report run_scenario(std::string_view name, const std::vector<std::string>& overrides) {
  json doc = scenario_document(name);
  for (const auto& o : overrides) apply_override(doc, o);
  const ExperimentConfig config = parse_config(doc);
  Report report = run(config, config.sim ? RunMode::Simulate : RunMode::Analyze);
  report.extras["scenario"] = std::string(name);
  const double ratio = config.params.mu / config.params.c;
  if (name == "prop1") {
    report.extras["min_mass_bound"] = 2 * config.params.mu - 1;
  } else if (name == "prop2") {
    report.extras["min_mass_bound"] = ratio - 1.0;
    report.extras["average_mass_limit"] = ratio - 1.0 + config.params.c;
  } else if (name == "flexible-benchmark") {
    report.extras["benchmark_mass"] = config.params.mu;
  }
  return report;
}

namespace {

json stats_json(const MassStats& stats) {
  json marginal = json::array();
  for (std::size_t m = 0; m < stats.mass_marginal.size(); ++m)
    if (stats.mass_marginal[m] > 0.0) marginal.push_back({m, stats.mass_marginal[m]});
  return {{"min_mass", stats.min_mass},
          {"max_mass", stats.max_mass},
          {"average_mass", stats.average_mass},
          {"average_intensity", stats.average_intensity},
          {"positive_intensity", stats.positive_intensity},
          {"mass_marginal", marginal}};
}

json spec_json(const TwoStateSpec& s) {
  return {{"d_low", s.d_low}, {"d_high", s.d_high}, {"alpha", s.alpha}, {"beta", s.beta}};
}

}  // namespace

json to_json(const Report& report, bool include_wall_clock) {
  json doc{{"tool", "periodize"}, {"version", version()}, {"config", to_json(report.config)}};
  if (report.feasibility)
    doc["feasibility"] = {{"feasible", report.feasibility->feasible},
                          {"average_intensity", report.feasibility->average_intensity},
                          {"budget", report.config.params.mu + report.config.params.epsilon}};
  if (report.constraint_violation) doc["constraint_violation"] = *report.constraint_violation;
  if (report.stats) doc["mass_stats"] = stats_json(*report.stats);
  if (!report.recurrent_pairs.empty()) {
    json pairs = json::array();
    for (const auto& [s, m] : report.recurrent_pairs) pairs.push_back({s, m});
    doc["recurrent_pairs"] = pairs;
  }
  if (report.longrun_cost) doc["agent_longrun_cost"] = *report.longrun_cost;
  if (report.flow_identity_residual) doc["flow_identity_residual"] = *report.flow_identity_residual;
  if (report.periodic)
    doc["periodic_plan"] = {{"cycle_length", report.periodic->cycle_length},
                            {"orbit", report.periodic->orbit},
                            {"orbit_count", report.periodic->orbit_count},
                            {"min_mass", report.periodic->min_mass()},
                            {"max_mass", report.periodic->max_mass()},
                            {"average_cost", report.periodic->average_cost},
                            {"cycle_cost", report.periodic->cycle_cost()}};
  if (report.simulation) {
    const auto& sim = *report.simulation;
    json j{{"T", sim.config.periods}, {"seed", sim.config.seed}, {"m0", sim.config.m0},
           {"average_mass", sim.average_mass}, {"average_cost", sim.average_cost},
           {"min_mass_second_half", sim.min_mass_second_half}};
    if (sim.pair_tv_distance) j["pair_tv_distance"] = *sim.pair_tv_distance;
    if (sim.mass_tv_distance) j["mass_tv_distance"] = *sim.mass_tv_distance;
    doc["simulation"] = j;
  }
  if (report.search) {
    const auto& s = *report.search;
    json j{{"agent", to_string(s.agent)},
           {"candidates", s.table.size()},
           {"infeasible", s.count(CandidateStatus::Infeasible)},
           {"not_unichain", s.count(CandidateStatus::NotUnichain)},
           {"evaluated", s.count(CandidateStatus::Evaluated)},
           {"property_violations", s.property_violations()},
           {"best_min_mass", s.best_min_mass},
           {"table", "search.csv"}};
    if (s.best_policy) j["best_policy"] = spec_json(*s.best_policy);
    if (s.best_index) {
      const auto& r = s.table[*s.best_index];
      j["best_average_mass"] = r.average_mass;
      j["best_average_intensity"] = r.average_intensity;
    }
    doc["search"] = j;
  }
  if (!report.extras.empty()) doc["extras"] = report.extras;
  if (include_wall_clock) doc["wall_seconds"] = report.wall_seconds;
  return doc;
}

std::string summary_text(const Report& report) {
  std::ostringstream out;
  const auto& p = report.config.params;
  out << "periodize " << version() << "\n";
  out << "params: mu=" << p.mu << " c=" << fmt_short(p.c) << " delta=" << fmt_short(p.delta)
      << " epsilon=" << fmt_short(p.epsilon) << " agent=" << to_string(report.config.agent) << "\n";
  if (report.extras.contains("scenario"))
    out << "scenario: " << report.extras["scenario"].get<std::string>() << "\n";
  if (report.feasibility)
    out << "feasibility: " << (report.feasibility->feasible ? "feasible" : "INFEASIBLE")
        << " (average intensity " << fmt_short(report.feasibility->average_intensity, 9)
        << " vs budget " << fmt_short(p.mu + p.epsilon, 9) << ")\n";
  if (report.constraint_violation)
    out << "constraint violation: " << *report.constraint_violation << "\n";
  if (report.stats) {
    const auto& s = *report.stats;
    out << "minimal recurrent mass: " << s.min_mass << "\n";
    out << "maximal recurrent mass: " << s.max_mass << "\n";
    out << "average mass: " << fmt_short(s.average_mass, 9) << "\n";
    out << "average intensity: " << fmt_short(s.average_intensity, 9) << "\n";
    out << "mass marginal:";
    for (std::size_t m = 0; m < s.mass_marginal.size(); ++m)
      if (s.mass_marginal[m] > kSupportThreshold) out << " " << m << ":" << fmt_short(s.mass_marginal[m], 9);
    out << "\n";
  }
  if (report.longrun_cost) out << "agent long-run cost: " << fmt_short(*report.longrun_cost, 9) << "\n";
  if (report.flow_identity_residual)
    out << "flow identity residual: " << fmt_short(*report.flow_identity_residual, 3) << "\n";
  if (report.periodic) {
    out << "periodic reply orbit:";
    for (Mass m : report.periodic->orbit) out << " " << m;
    out << " (min " << report.periodic->min_mass() << ", cost per cycle "
        << fmt_short(report.periodic->cycle_cost(), 9) << ")\n";
  }
  if (report.extras.contains("saving_per_cycle"))
    out << "saving vs tracking plan per cycle: "
        << fmt_short(report.extras["saving_per_cycle"].get<double>(), 9) << "\n";
  if (report.extras.contains("stochastic_contrast"))
    out << "stochastic two-state contrast: minimal mass "
        << report.extras["stochastic_contrast"]["min_mass"].get<int>() << "\n";
  if (report.simulation) {
    const auto& sim = *report.simulation;
    out << "simulation: T=" << sim.config.periods << " seed=" << sim.config.seed
        << " m0=" << sim.config.m0 << " average mass " << fmt_short(sim.average_mass, 9);
    if (sim.mass_tv_distance) out << " mass TV " << fmt_short(*sim.mass_tv_distance, 4);
    if (sim.pair_tv_distance) out << " pair TV " << fmt_short(*sim.pair_tv_distance, 4);
    out << "\n";
  }
  if (report.search) {
    const auto& s = *report.search;
    out << "search: " << s.table.size() << " candidates, " << s.count(CandidateStatus::Evaluated)
        << " evaluated, " << s.count(CandidateStatus::NotUnichain) << " not unichain, "
        << s.property_violations() << " property violations\n";
    out << "best minimal mass: " << s.best_min_mass;
    if (s.best_policy)
      out << " at d_low=" << s.best_policy->d_low << " d_high=" << s.best_policy->d_high
          << " alpha=" << fmt_short(s.best_policy->alpha) << " beta=" << fmt_short(s.best_policy->beta);
    out << "\n";
  }
  return out.str();
}

std::string mass_marginal_csv(const MassStats& stats) {
  std::string out = "mass,probability\n";
  for (std::size_t m = 0; m < stats.mass_marginal.size(); ++m)
    out += std::to_string(m) + "," + fmt(stats.mass_marginal[m]) + "\n";
  return out;
}

std::string search_table_csv(const SearchReport& search) {
  std::string out =
      "d_low,d_high,alpha,beta,status,average_intensity,min_mass,max_mass,average_mass,"
      "positive_intensity,properties_ok\n";
  for (const auto& r : search.table) {
    const char* status = r.status == CandidateStatus::Evaluated     ? "evaluated"
                         : r.status == CandidateStatus::NotUnichain ? "not_unichain"
                                                                    : "infeasible";
    out += std::to_string(r.spec.d_low) + "," + std::to_string(r.spec.d_high) + "," +
           fmt(r.spec.alpha) + "," + fmt(r.spec.beta) + "," + status + "," +
           fmt(r.average_intensity) + ",";
    if (r.status == CandidateStatus::Evaluated)
      out += std::to_string(r.min_mass) + "," + std::to_string(r.max_mass) + "," +
             fmt(r.average_mass) + "," + fmt(r.positive_intensity) + "," +
             (r.properties_ok() ? "1" : "0") + "\n";
    else
      out += ",,,,\n";
  }
  return out;
}

void write_report(const Report& report, const std::string& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  const auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream out(fs::path(directory) / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (fs::path(directory) / name).string());
    out << content;
  };
  write("summary.txt", summary_text(report));
  write("report.json", to_json(report).dump(2) + "\n");
  if (report.stats) write("mass_marginal.csv", mass_marginal_csv(*report.stats));
  if (report.search) write("search.csv", search_table_csv(*report.search));
}

}  // namespace periodize
