#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "periodize/model.hpp"

namespace periodize {

/// Mass cap below the largest intensity of the trainer's program.
class InvalidCap : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Stationary agent strategy on extended states (trainer state s_t, previous
/// mass m_{t-1}), with m_{t-1} in 0..max_mass. Each entry is an increment in
/// {-1, 0, +1} that keeps the mass inside [0, max_mass].
class AgentPolicy {
 public:
  AgentPolicy(std::size_t trainer_states, Mass max_mass, std::vector<int> moves);

  std::size_t trainer_states() const noexcept { return trainer_states_; }
  Mass max_mass() const noexcept { return max_mass_; }

  int move(std::size_t s, Mass prev) const {
    return moves_[s * static_cast<std::size_t>(max_mass_ + 1) + static_cast<std::size_t>(prev)];
  }

  /// Mass chosen at state s after prev. Above the cap the agent steps down.
  Mass next_mass(std::size_t s, Mass prev) const {
    return prev > max_mass_ ? prev - 1 : prev + move(s, prev);
  }

  const std::vector<int>& moves() const noexcept { return moves_; }

  bool operator==(const AgentPolicy&) const = default;

 private:
  std::size_t trainer_states_;
  Mass max_mass_;
  std::vector<int> moves_;
};

/// Best reply of a myopic (delta = 0) agent: step toward the current intensity.
Mass myopic_best_reply(Intensity d, Mass prev);

/// The myopic rule tabulated over extended states.
AgentPolicy myopic_policy(const TrainerPolicy& policy, std::optional<Mass> max_mass = {});

struct SolverDiagnostics {
  int iterations = 0;
  /// Span of (T V - V) for the returned value function.
  double bellman_span = 0.0;
  /// Largest |min_a Q(x, a) - Q(x, chosen)| after tie-breaking.
  double greedy_gap = 0.0;
};

struct AgentSolution {
  AgentPolicy policy;
  /// Discounted cost-to-go indexed like AgentPolicy::moves().
  std::vector<double> value;
  SolverDiagnostics diagnostics;
};

/**
 * Bellman-optimal stationary reply to a trainer program under the discounted
 * per-period cost c*m_t + max(0, d(s_t) - m_t).
 *
 * Policy iteration with exact evaluation. When several increments are
 * optimal, 0 is preferred, then -1, then +1. max_mass defaults to the largest
 * intensity of the program; a smaller cap throws InvalidCap.
 */
AgentSolution solve_agent(const TrainerPolicy& policy, const ModelParams& params,
                          std::optional<Mass> max_mass = {});

inline AgentPolicy solve_agent_mdp(const TrainerPolicy& policy, const ModelParams& params,
                                   std::optional<Mass> max_mass = {}) {
  return solve_agent(policy, params, max_mass).policy;
}

/// Largest violation of the Bellman optimality equation by the given policy,
/// measured by a one-step lookahead on its own value function.
double bellman_violation(const TrainerPolicy& policy, const ModelParams& params,
                         const AgentPolicy& agent);

/// Reply to a deterministic cycle of intensities, and its recurrent orbit.
struct PeriodicPlan {
  std::size_t cycle_length = 0;
  AgentPolicy policy;
  /// Masses m_t along one traversal of the recurrent orbit, starting at phase 0.
  std::vector<Mass> orbit;
  /// Number of distinct recurrent orbits of the plan.
  std::size_t orbit_count = 0;
  double average_cost = 0.0;
  double cycle_cost() const { return average_cost * static_cast<double>(cycle_length); }
  Mass min_mass() const;
  Mass max_mass() const;
};

/// The orbit reported is the one reached from phase 0 with zero previous mass.
PeriodicPlan cyclic_best_reply(const std::vector<Intensity>& cycle, const ModelParams& params,
                               std::optional<Mass> max_mass = {});

/// Long-run average of c*m + max(0, d - m) under the extended chain's
/// invariant distribution. Propagates MultipleRecurrentClasses.
double agent_longrun_cost(const TrainerPolicy& policy, const AgentPolicy& agent,
                          const ModelParams& params);

/// Total cost over one cycle of a fixed mass sequence played against a cycle
/// of intensities of the same length.
double cycle_plan_cost(const std::vector<Intensity>& cycle, const std::vector<Mass>& masses,
                       double c);

}  // namespace periodize
