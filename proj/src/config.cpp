#include "periodize/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace periodize {

using nlohmann::json;

SchemaError::SchemaError(std::string path, const std::string& message)
    : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

std::string_view to_string(AgentKind kind) {
  return kind == AgentKind::Myopic ? "myopic" : "patient";
}

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, const std::string& path, std::set<std::string> allowed) {
  for (const auto& [key, _] : obj.items())
    if (!allowed.contains(key)) throw SchemaError(join(path, key), "unknown key");
}

const json& require_object(const json& value, const std::string& path) {
  if (!value.is_object()) throw SchemaError(path.empty() ? "$" : path, "expected an object");
  return value;
}

double read_number(const json& obj, const std::string& path, const std::string& key,
                   std::optional<double> fallback = {}) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw SchemaError(join(path, key), "required key is missing");
  }
  const json& v = obj.at(key);
  if (!v.is_number()) throw SchemaError(join(path, key), "expected a number");
  return v.get<double>();
}

std::int64_t read_integer(const json& obj, const std::string& path, const std::string& key,
                          std::optional<std::int64_t> fallback = {}) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw SchemaError(join(path, key), "required key is missing");
  }
  const json& v = obj.at(key);
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == static_cast<double>(static_cast<std::int64_t>(d))) return static_cast<std::int64_t>(d);
  }
  throw SchemaError(join(path, key), "expected an integer");
}

std::vector<Intensity> read_intensities(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected an array of integers");
  std::vector<Intensity> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_integer()) throw SchemaError(path + "[" + std::to_string(i) + "]", "expected an integer");
    out.push_back(v[i].get<Intensity>());
  }
  return out;
}

std::vector<double> read_probabilities(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw SchemaError(path + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

TrainerSpec parse_trainer(const json& node) {
  const std::string path = "trainer";
  require_object(node, path);
  if (!node.contains("type")) throw SchemaError("trainer.type", "required key is missing");
  if (!node.at("type").is_string()) throw SchemaError("trainer.type", "expected a string");
  const auto type = node.at("type").get<std::string>();

  if (type == "constant") {
    reject_unknown(node, path, {"type", "intensity"});
    trainer_spec::Constant spec;
    if (node.contains("intensity")) spec.intensity = static_cast<Intensity>(read_integer(node, path, "intensity"));
    return spec;
  }
  if (type == "prop1") {
    reject_unknown(node, path, {"type"});
    return trainer_spec::Prop1{};
  }
  if (type == "prop2") {
    reject_unknown(node, path, {"type", "margin"});
    return trainer_spec::Prop2{read_number(node, path, "margin", 0.001)};
  }
  if (type == "cycle") {
    reject_unknown(node, path, {"type", "sequence"});
    if (!node.contains("sequence")) throw SchemaError("trainer.sequence", "required key is missing");
    return trainer_spec::Cycle{read_intensities(node.at("sequence"), "trainer.sequence")};
  }
  if (type == "two_state") {
    reject_unknown(node, path, {"type", "d_low", "d_high", "alpha", "beta"});
    return trainer_spec::TwoState{TwoStateSpec{
        static_cast<Intensity>(read_integer(node, path, "d_low")),
        static_cast<Intensity>(read_integer(node, path, "d_high")),
        read_number(node, path, "alpha"), read_number(node, path, "beta")}};
  }
  if (type == "matrix") {
    reject_unknown(node, path, {"type", "transitions", "intensity", "labels"});
    trainer_spec::Matrix spec;
    if (!node.contains("transitions")) throw SchemaError("trainer.transitions", "required key is missing");
    const json& rows = node.at("transitions");
    if (!rows.is_array()) throw SchemaError("trainer.transitions", "expected an array of rows");
    for (std::size_t i = 0; i < rows.size(); ++i)
      spec.transitions.push_back(read_probabilities(rows[i], "trainer.transitions[" + std::to_string(i) + "]"));
    if (!node.contains("intensity")) throw SchemaError("trainer.intensity", "required key is missing");
    spec.intensity = read_intensities(node.at("intensity"), "trainer.intensity");
    if (node.contains("labels")) {
      const json& labels = node.at("labels");
      if (!labels.is_array()) throw SchemaError("trainer.labels", "expected an array of strings");
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!labels[i].is_string()) throw SchemaError("trainer.labels[" + std::to_string(i) + "]", "expected a string");
        spec.labels.push_back(labels[i].get<std::string>());
      }
    } else {
      for (std::size_t i = 0; i < spec.intensity.size(); ++i) spec.labels.push_back("s" + std::to_string(i));
    }
    return spec;
  }
  throw SchemaError("trainer.type", "unknown trainer type '" + type + "'");
}

AgentKind parse_agent(const json& node, ModelParams& params) {
  std::string kind;
  if (node.is_string()) {
    kind = node.get<std::string>();
  } else if (node.is_object()) {
    reject_unknown(node, "agent", {"kind", "delta"});
    if (!node.contains("kind") || !node.at("kind").is_string())
      throw SchemaError("agent.kind", "expected a string");
    kind = node.at("kind").get<std::string>();
    if (node.contains("delta")) params.delta = read_number(node, "agent", "delta");
  } else {
    throw SchemaError("agent", "expected \"myopic\", \"patient\" or an object");
  }
  if (kind == "myopic") return AgentKind::Myopic;
  if (kind == "patient") return AgentKind::Patient;
  throw SchemaError(node.is_string() ? "agent" : "agent.kind", "unknown agent kind '" + kind + "'");
}

SearchConfig parse_search(const json& node, const ModelParams& params, AgentKind kind) {
  require_object(node, "search");
  reject_unknown(node, "search", {"d_min", "d_max", "probabilities", "alpha_one_only", "threads"});
  const IntensityRange fallback = default_intensity_grid(params, kind);
  SearchConfig search;
  search.intensities.low = static_cast<Intensity>(read_integer(node, "search", "d_min", fallback.low));
  search.intensities.high = static_cast<Intensity>(read_integer(node, "search", "d_max", fallback.high));
  if (!node.contains("probabilities") ||
      (node.at("probabilities").is_string() && node.at("probabilities").get<std::string>() == "default")) {
    search.probabilities = default_probability_grid();
  } else {
    search.probabilities = read_probabilities(node.at("probabilities"), "search.probabilities");
  }
  if (node.contains("alpha_one_only")) {
    if (!node.at("alpha_one_only").is_boolean()) throw SchemaError("search.alpha_one_only", "expected a boolean");
    search.alpha_one_only = node.at("alpha_one_only").get<bool>();
  }
  const auto threads = read_integer(node, "search", "threads", 0);
  if (threads < 0) throw ValueError("search.threads must be nonnegative");
  search.threads = static_cast<unsigned>(threads);

  if (search.intensities.low < 0 || search.intensities.high <= search.intensities.low)
    throw ValueError("search intensity range needs 0 <= d_min < d_max");
  if (search.probabilities.empty()) throw ValueError("search.probabilities is empty");
  for (double p : search.probabilities)
    if (!(p > 0.0 && p <= 1.0)) throw ValueError("search.probabilities must lie in (0, 1]");
  return search;
}

void validate_trainer(const ExperimentConfig& config) {
  try {
    (void)build_trainer(config);
  } catch (const NonIntegerRatio& e) {
    throw ValueError(std::string("NonIntegerRatio: ") + e.what());
  } catch (const InfeasibleMargin& e) {
    throw ValueError(std::string("InfeasibleMargin: ") + e.what());
  } catch (const MultipleRecurrentClasses& e) {
    throw ValueError(std::string("trainer process must be unichain: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ValueError(e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  require_object(doc, "");
  reject_unknown(doc, "", {"mu", "c", "delta", "epsilon", "trainer", "agent", "sim", "search", "output"});

  ExperimentConfig config;
  const auto mu = read_integer(doc, "", "mu");
  config.params.mu = static_cast<int>(mu);
  config.params.c = read_number(doc, "", "c");
  config.params.delta = read_number(doc, "", "delta", 0.999);
  config.params.epsilon = read_number(doc, "", "epsilon", 0.01);
  if (doc.contains("agent")) config.agent = parse_agent(doc.at("agent"), config.params);
  try {
    config.params.validate();
  } catch (const std::invalid_argument& e) {
    throw ValueError(e.what());
  }

  if (doc.contains("trainer")) config.trainer = parse_trainer(doc.at("trainer"));
  if (doc.contains("search")) config.search = parse_search(doc.at("search"), config.params, config.agent);
  if (!config.trainer && !config.search)
    throw SchemaError("trainer", "required key is missing");

  if (doc.contains("sim")) {
    const json& node = require_object(doc.at("sim"), "sim");
    reject_unknown(node, "sim", {"T", "seed", "m0"});
    SimConfig sim;
    sim.periods = read_integer(node, "sim", "T", sim.periods);
    const auto seed = read_integer(node, "sim", "seed", 0);
    if (seed < 0) throw ValueError("sim.seed must be nonnegative");
    sim.seed = static_cast<std::uint64_t>(seed);
    sim.m0 = static_cast<Mass>(read_integer(node, "sim", "m0", 0));
    if (sim.periods < 1) throw ValueError("sim.T must be at least 1");
    if (sim.m0 < 0) throw ValueError("sim.m0 must be nonnegative");
    config.sim = sim;
  }
  if (doc.contains("output")) {
    if (!doc.at("output").is_string()) throw SchemaError("output", "expected a string");
    config.output = doc.at("output").get<std::string>();
  }
  if (config.trainer) validate_trainer(config);
  return config;
}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("malformed document: ") + e.what());
  }
  return parse_config(doc);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("$", "cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  return parse_config(std::string_view(text));
}

namespace {

struct TrainerToJson {
  json operator()(const trainer_spec::Constant& s) const {
    json j{{"type", "constant"}};
    if (s.intensity) j["intensity"] = *s.intensity;
    return j;
  }
  json operator()(const trainer_spec::Prop1&) const { return {{"type", "prop1"}}; }
  json operator()(const trainer_spec::Prop2& s) const { return {{"type", "prop2"}, {"margin", s.margin}}; }
  json operator()(const trainer_spec::Cycle& s) const { return {{"type", "cycle"}, {"sequence", s.sequence}}; }
  json operator()(const trainer_spec::TwoState& s) const {
    return {{"type", "two_state"}, {"d_low", s.spec.d_low}, {"d_high", s.spec.d_high},
            {"alpha", s.spec.alpha}, {"beta", s.spec.beta}};
  }
  json operator()(const trainer_spec::Matrix& s) const {
    return {{"type", "matrix"}, {"transitions", s.transitions}, {"intensity", s.intensity},
            {"labels", s.labels}};
  }
};

}  // namespace

json to_json(const ExperimentConfig& config) {
  json doc{{"mu", config.params.mu},
           {"c", config.params.c},
           {"delta", config.params.delta},
           {"epsilon", config.params.epsilon},
           {"agent", to_string(config.agent)},
           {"output", config.output}};
  if (config.trainer) doc["trainer"] = std::visit(TrainerToJson{}, *config.trainer);
  if (config.sim)
    doc["sim"] = {{"T", config.sim->periods}, {"seed", config.sim->seed}, {"m0", config.sim->m0}};
  if (config.search)
    doc["search"] = {{"d_min", config.search->intensities.low},
                     {"d_max", config.search->intensities.high},
                     {"probabilities", config.search->probabilities},
                     {"alpha_one_only", config.search->alpha_one_only},
                     {"threads", config.search->threads}};
  return doc;
}

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw SchemaError("$", "override must look like key=value: " + std::string(assignment));
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &doc;
  std::string_view rest = key;
  for (;;) {
    const auto dot = rest.find('.');
    const std::string part(rest.substr(0, dot));
    if (!node->is_object()) throw SchemaError(key, "cannot descend into a non-object");
    if (dot == std::string_view::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    rest = rest.substr(dot + 1);
  }
}

TrainerPolicy build_trainer(const ExperimentConfig& config) {
  if (!config.trainer) throw SchemaError("trainer", "required key is missing");
  const ModelParams& params = config.params;
  return std::visit(
      [&](const auto& spec) -> TrainerPolicy {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, trainer_spec::Constant>) {
          return constant_policy(spec.intensity.value_or(params.mu));
        } else if constexpr (std::is_same_v<T, trainer_spec::Prop1>) {
          return prop1_policy(params.mu, params.epsilon);
        } else if constexpr (std::is_same_v<T, trainer_spec::Prop2>) {
          return prop2_policy(params, spec.margin);
        } else if constexpr (std::is_same_v<T, trainer_spec::Cycle>) {
          return cycle_policy(spec.sequence);
        } else if constexpr (std::is_same_v<T, trainer_spec::TwoState>) {
          return spec.spec.to_policy();
        } else {
          return TrainerPolicy(spec.labels, TransitionMatrix::from_rows(spec.transitions),
                               spec.intensity);
        }
      },
      *config.trainer);
}

}  // namespace periodize
