#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "periodize/model.hpp"
#include "periodize/trainer.hpp"

namespace periodize {

/// Malformed document: missing key, wrong type or unknown key. path() is the
/// dotted location of the offending key.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& message);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Well-formed document whose values violate a model invariant.
class ValueError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace trainer_spec {
struct Constant {
  /// Defaults to mu.
  std::optional<Intensity> intensity;
  bool operator==(const Constant&) const = default;
};
struct Prop1 {
  bool operator==(const Prop1&) const = default;
};
struct Prop2 {
  double margin = 0.001;
  bool operator==(const Prop2&) const = default;
};
struct Cycle {
  std::vector<Intensity> sequence;
  bool operator==(const Cycle&) const = default;
};
struct TwoState {
  TwoStateSpec spec;
  bool operator==(const TwoState&) const = default;
};
struct Matrix {
  std::vector<std::vector<double>> transitions;
  std::vector<Intensity> intensity;
  std::vector<std::string> labels;
  bool operator==(const Matrix&) const = default;
};
}  // namespace trainer_spec

using TrainerSpec = std::variant<trainer_spec::Constant, trainer_spec::Prop1, trainer_spec::Prop2,
                                 trainer_spec::Cycle, trainer_spec::TwoState, trainer_spec::Matrix>;

struct SimConfig {
  std::int64_t periods = 1'000'000;
  std::uint64_t seed = 0;
  Mass m0 = 0;
  bool operator==(const SimConfig&) const = default;
};

struct SearchConfig {
  IntensityRange intensities;
  std::vector<double> probabilities;
  bool alpha_one_only = false;
  unsigned threads = 0;
  bool operator==(const SearchConfig& o) const {
    return intensities.low == o.intensities.low && intensities.high == o.intensities.high &&
           probabilities == o.probabilities && alpha_one_only == o.alpha_one_only &&
           threads == o.threads;
  }
};

struct ExperimentConfig {
  ModelParams params;
  std::optional<TrainerSpec> trainer;
  AgentKind agent = AgentKind::Patient;
  std::optional<SimConfig> sim;
  std::optional<SearchConfig> search;
  std::string output = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
/// Parses JSON text; syntax errors surface as SchemaError at path "$".
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Canonical document with every default written out; parse_config of the
/// result reproduces the config.
nlohmann::json to_json(const ExperimentConfig& config);

/// Applies "dotted.key=value" to a document. The value is read as JSON when it
/// parses, otherwise as a string.
void apply_override(nlohmann::json& doc, std::string_view assignment);

TrainerPolicy build_trainer(const ExperimentConfig& config);

std::string_view to_string(AgentKind kind);

}  // namespace periodize
