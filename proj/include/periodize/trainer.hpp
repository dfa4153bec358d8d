#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "periodize/model.hpp"

namespace periodize {

class NonIntegerRatio : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InfeasibleMargin : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two-state program: L (index 0) with intensity d_low and H (index 1) with
/// intensity d_high. alpha = P(L -> H), beta = P(H -> L).
struct TwoStateSpec {
  Intensity d_low = 0;
  Intensity d_high = 1;
  double alpha = 1.0;
  double beta = 1.0;

  void validate() const;
  /// Invariant probability of H.
  double high_probability() const { return alpha / (alpha + beta); }
  double average_intensity() const;
  TrainerPolicy to_policy() const;

  bool operator==(const TwoStateSpec&) const = default;
};

TrainerPolicy constant_policy(Intensity mu);

/// f(H) = 2 mu, f(L) = 0, L -> H surely and H -> L with the smallest beta that
/// meets the budget mu + epsilon with equality.
TrainerPolicy prop1_policy(int mu, double epsilon);
double prop1_beta(int mu, double epsilon);

/// Two-state program with f(L) = 0 and f(H) = d_high whose invariant H-weight
/// is high_probability. Below c = 1/2 the high state never repeats (beta = 1);
/// otherwise rest never repeats (alpha = 1).
TwoStateSpec persistence_spec(Intensity d_high, double c, double high_probability);

/// Same shape with f(H) = mu / c and H-weight c + margin. Throws
/// NonIntegerRatio if mu / c is not an integer within 1e-9 and
/// InfeasibleMargin if margin * mu / c exceeds epsilon.
TwoStateSpec prop2_spec(const ModelParams& params, double margin = 0.001);
TrainerPolicy prop2_policy(const ModelParams& params, double margin = 0.001);

/// Deterministic cycle with one state per phase.
TrainerPolicy cycle_policy(const std::vector<Intensity>& sequence);

struct FeasibilityResult {
  bool feasible = false;
  double average_intensity = 0.0;
};

/// Compares the invariant average intensity with mu + epsilon.
FeasibilityResult feasibility_check(const TrainerPolicy& policy, const ModelParams& params);

enum class AgentKind { Myopic, Patient };

struct IntensityRange {
  Intensity low = 0;
  Intensity high = 0;
};

/// Probabilities {0.02, 0.04, ..., 0.98, 0.99, 0.999, 1}.
std::vector<double> default_probability_grid();

/// Default intensity grid: 0..3 mu for myopic agents, 0..mu/c + 2 otherwise.
IntensityRange default_intensity_grid(const ModelParams& params, AgentKind kind);

enum class CandidateStatus { Infeasible, NotUnichain, Evaluated };

struct SearchRecord {
  TwoStateSpec spec;
  CandidateStatus status = CandidateStatus::Infeasible;
  double average_intensity = 0.0;
  Mass min_mass = -1;
  Mass max_mass = -1;
  double average_mass = 0.0;
  double positive_intensity = 0.0;
  /// E[m] within the agent's average-mass bound (2 mu myopic, mu/c patient).
  bool average_bound_ok = true;
  /// Patient and min_mass >= 1: E[m] <= mu/c - 1 + c.
  bool strong_average_bound_ok = true;
  /// Patient and min_mass >= 1: P(d > 0) >= c.
  bool positive_intensity_bound_ok = true;
  /// Myopic with non-degenerate intensity: min_mass <= 2 mu - 1.
  bool min_mass_bound_ok = true;

  bool feasible() const { return status != CandidateStatus::Infeasible; }
  bool properties_ok() const {
    return average_bound_ok && strong_average_bound_ok && positive_intensity_bound_ok &&
           min_mass_bound_ok;
  }
};

struct SearchReport {
  AgentKind agent = AgentKind::Myopic;
  ModelParams params;
  /// -1 when no feasible unichain candidate exists.
  Mass best_min_mass = -1;
  std::optional<TwoStateSpec> best_policy;
  std::optional<std::size_t> best_index;
  std::vector<SearchRecord> table;

  std::size_t count(CandidateStatus status) const;
  std::size_t property_violations() const;
};

struct SearchOptions {
  IntensityRange intensities;
  std::vector<double> probabilities;
  /// Tolerance on the property flags.
  double tolerance = 1e-6;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;
  /// Keep only candidates with alpha == 1.
  bool alpha_one_only = false;
};

/**
 * Exhaustive search over two-state programs with d_low < d_high drawn from
 * the intensity range and alpha, beta from the probability grid. Infeasible
 * candidates are recorded and skipped; the others are solved for the agent's
 * best reply and scored by the minimal recurrent mass. Ties go to the larger
 * average mass, then to the earlier grid entry. The table is in grid order
 * (d_low, d_high, alpha, beta) regardless of the thread count.
 */
SearchReport search_two_state(const ModelParams& params, AgentKind kind,
                              const SearchOptions& options);

}  // namespace periodize
