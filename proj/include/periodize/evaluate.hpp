#pragma once

#include <cstdint>
#include <vector>

#include "periodize/agent.hpp"
#include "periodize/markov.hpp"
#include "periodize/model.hpp"

namespace periodize {

/// Stationary weights below this count as outside the support.
inline constexpr double kSupportThreshold = 1e-12;

/// Joint chain over pairs (s_t, m_t) induced by a trainer program and an agent
/// strategy. Pair (s, m) has index s * (max_mass + 1) + m.
class ExtendedChain {
 public:
  ExtendedChain(TrainerPolicy trainer, AgentPolicy agent, TransitionMatrix transitions,
                Distribution stationary);

  const TrainerPolicy& trainer() const noexcept { return trainer_; }
  const AgentPolicy& agent() const noexcept { return agent_; }
  const TransitionMatrix& transitions() const noexcept { return transitions_; }
  const Distribution& stationary() const noexcept { return stationary_; }

  Mass max_mass() const noexcept { return agent_.max_mass(); }
  std::size_t size() const noexcept { return transitions_.size(); }
  std::size_t index(std::size_t s, Mass m) const {
    return s * static_cast<std::size_t>(max_mass() + 1) + static_cast<std::size_t>(m);
  }
  std::size_t state_of(std::size_t i) const { return i / static_cast<std::size_t>(max_mass() + 1); }
  Mass mass_of(std::size_t i) const {
    return static_cast<Mass>(i % static_cast<std::size_t>(max_mass() + 1));
  }

  /// Pairs with stationary weight above kSupportThreshold.
  std::vector<std::pair<std::size_t, Mass>> recurrent_pairs() const;

 private:
  TrainerPolicy trainer_;
  AgentPolicy agent_;
  TransitionMatrix transitions_;
  Distribution stationary_;
};

/// Transition matrix over (s_t, m_t): from (s, m) the trainer moves to s' with
/// P(s, s') and the agent, having observed s', sets m' = m + move(s', m).
TransitionMatrix extended_transitions(const TrainerPolicy& trainer, const AgentPolicy& agent);

/// Throws InvalidCap when the agent's cap is below the largest intensity, and
/// MultipleRecurrentClasses when the joint chain is not unichain.
ExtendedChain build_extended_chain(const TrainerPolicy& trainer, const AgentPolicy& agent);

struct MassStats {
  Mass min_mass = 0;
  Mass max_mass = 0;
  Distribution mass_marginal;
  double average_mass = 0.0;
  double average_intensity = 0.0;
  /// Stationary probability that the intensity is positive.
  double positive_intensity = 0.0;
};

MassStats mass_stats(const ExtendedChain& chain);

/// |sum_{d>m} lambda(m,d)(m+1) - sum_{d<m} lambda(m,d) m| where lambda is the
/// invariant law of (m_{t-1}, d_t), derived from one-step flows of the chain.
double flow_identity_residual(const ExtendedChain& chain);

struct PeriodRecord {
  std::int64_t t = 0;
  std::uint32_t state = 0;
  Intensity intensity = 0;
  Mass mass = 0;
  double cost = 0.0;
};

struct SimulationPath {
  std::uint64_t seed = 0;
  Mass initial_mass = 0;
  std::vector<PeriodRecord> records;

  std::size_t length() const noexcept { return records.size(); }

  /// Empirical frequencies of (s_t, m_t) over the last half of the path,
  /// indexed like ExtendedChain. Masses above max_mass are dropped from the
  /// counts but not from the denominator.
  std::vector<double> pair_frequencies(std::size_t trainer_states, Mass max_mass) const;

  double average_cost() const;
  double average_mass() const;
};

/// Seeded simulation. The first trainer state is drawn from the trainer's
/// invariant distribution; m0 may exceed the agent's cap, in which case the
/// agent steps down until it is back under the cap.
SimulationPath simulate(const TrainerPolicy& trainer, const AgentPolicy& agent, Mass m0,
                        std::int64_t periods, std::uint64_t seed, double c = 0.0);

/// Total-variation distance between the empirical pair law of a path and the
/// chain's invariant distribution.
double simulation_tv_distance(const SimulationPath& path, const ExtendedChain& chain);

/// Total-variation distance between the empirical mass law (last half of the
/// path) and the exact mass marginal.
double mass_tv_distance(const SimulationPath& path, const MassStats& stats);

}  // namespace periodize
