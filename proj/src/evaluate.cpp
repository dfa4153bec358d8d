#include "periodize/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace periodize {

ExtendedChain::ExtendedChain(TrainerPolicy trainer, AgentPolicy agent, TransitionMatrix transitions,
                             Distribution stationary)
    : trainer_(std::move(trainer)),
      agent_(std::move(agent)),
      transitions_(std::move(transitions)),
      stationary_(std::move(stationary)) {}

std::vector<std::pair<std::size_t, Mass>> ExtendedChain::recurrent_pairs() const {
  std::vector<std::pair<std::size_t, Mass>> pairs;
  for (std::size_t i = 0; i < size(); ++i)
    if (stationary_[i] > kSupportThreshold) pairs.emplace_back(state_of(i), mass_of(i));
  return pairs;
}

TransitionMatrix extended_transitions(const TrainerPolicy& trainer, const AgentPolicy& agent) {
  if (agent.trainer_states() != trainer.size())
    throw std::invalid_argument("agent policy and trainer policy disagree on the state count");
  if (agent.max_mass() < trainer.max_intensity())
    throw InvalidCap("agent mass cap is below the largest intensity");
  const std::size_t width = static_cast<std::size_t>(agent.max_mass()) + 1;
  const auto n = static_cast<Eigen::Index>(trainer.size() * width);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t s = 0; s < trainer.size(); ++s)
    for (Mass m = 0; m <= agent.max_mass(); ++m)
      for (std::size_t next = 0; next < trainer.size(); ++next) {
        const double prob = trainer.transitions()(s, next);
        if (prob == 0.0) continue;
        const Mass m_next = agent.next_mass(next, m);
        p(static_cast<Eigen::Index>(s * width + static_cast<std::size_t>(m)),
          static_cast<Eigen::Index>(next * width + static_cast<std::size_t>(m_next))) += prob;
      }
  return TransitionMatrix(std::move(p));
}

ExtendedChain build_extended_chain(const TrainerPolicy& trainer, const AgentPolicy& agent) {
  TransitionMatrix p = extended_transitions(trainer, agent);
  Distribution stationary = stationary_distribution(p);
  return ExtendedChain(trainer, agent, std::move(p), std::move(stationary));
}

MassStats mass_stats(const ExtendedChain& chain) {
  const Mass cap = chain.max_mass();
  std::vector<double> marginal(static_cast<std::size_t>(cap) + 1, 0.0);
  MassStats stats;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const double w = chain.stationary()[i];
    const Intensity d = chain.trainer().intensity(chain.state_of(i));
    marginal[static_cast<std::size_t>(chain.mass_of(i))] += w;
    stats.average_mass += w * chain.mass_of(i);
    stats.average_intensity += w * d;
    if (d > 0) stats.positive_intensity += w;
  }
  stats.min_mass = cap;
  stats.max_mass = 0;
  for (Mass m = 0; m <= cap; ++m) {
    if (marginal[static_cast<std::size_t>(m)] <= kSupportThreshold) continue;
    stats.min_mass = std::min(stats.min_mass, m);
    stats.max_mass = std::max(stats.max_mass, m);
  }
  // Re-normalize against summation drift before validating as a distribution.
  double total = 0.0;
  for (double w : marginal) total += w;
  for (double& w : marginal) w /= total;
  stats.mass_marginal = Distribution(std::move(marginal));
  return stats;
}

double flow_identity_residual(const ExtendedChain& chain) {
  // lambda(m, d) = sum_s pi(s, m) * P(s, s') over s' with d(s') = d, i.e. the
  // law of (m_t, d_{t+1}) under stationarity.
  const auto& trainer = chain.trainer();
  double up = 0.0;
  double down = 0.0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const double w = chain.stationary()[i];
    if (w == 0.0) continue;
    const std::size_t s = chain.state_of(i);
    const Mass m = chain.mass_of(i);
    for (std::size_t next = 0; next < trainer.size(); ++next) {
      const double flow = w * trainer.transitions()(s, next);
      const Intensity d = trainer.intensity(next);
      if (d > m) up += flow * (m + 1);
      else if (d < m) down += flow * m;
    }
  }
  return std::abs(up - down);
}

std::vector<double> SimulationPath::pair_frequencies(std::size_t trainer_states, Mass max_mass) const {
  const std::size_t width = static_cast<std::size_t>(max_mass) + 1;
  std::vector<double> freq(trainer_states * width, 0.0);
  const std::size_t first = records.size() / 2;
  const std::size_t count = records.size() - first;
  if (count == 0) return freq;
  for (std::size_t t = first; t < records.size(); ++t) {
    const auto& r = records[t];
    if (r.mass <= max_mass) freq[r.state * width + static_cast<std::size_t>(r.mass)] += 1.0;
  }
  for (double& f : freq) f /= static_cast<double>(count);
  return freq;
}

double SimulationPath::average_cost() const {
  double total = 0.0;
  for (const auto& r : records) total += r.cost;
  return records.empty() ? 0.0 : total / static_cast<double>(records.size());
}

double SimulationPath::average_mass() const {
  double total = 0.0;
  for (const auto& r : records) total += r.mass;
  return records.empty() ? 0.0 : total / static_cast<double>(records.size());
}

SimulationPath simulate(const TrainerPolicy& trainer, const AgentPolicy& agent, Mass m0,
                        std::int64_t periods, std::uint64_t seed, double c) {
  if (periods < 1) throw std::invalid_argument("simulation needs at least one period");
  if (m0 < 0) throw std::invalid_argument("initial mass must be nonnegative");
  if (agent.trainer_states() != trainer.size())
    throw std::invalid_argument("agent policy and trainer policy disagree on the state count");

  std::mt19937_64 rng(seed);
  const auto initial_weights = trainer.stationary().weights();
  std::discrete_distribution<std::size_t> initial(initial_weights.begin(), initial_weights.end());
  std::vector<std::discrete_distribution<std::size_t>> rows;
  rows.reserve(trainer.size());
  for (std::size_t s = 0; s < trainer.size(); ++s) {
    const auto& p = trainer.transitions().matrix();
    const Eigen::RowVectorXd row = p.row(static_cast<Eigen::Index>(s));
    rows.emplace_back(row.data(), row.data() + row.size());
  }

  SimulationPath path{seed, m0, {}};
  path.records.reserve(static_cast<std::size_t>(periods));
  std::size_t s = initial(rng);
  Mass m = m0;
  for (std::int64_t t = 1; t <= periods; ++t) {
    if (t > 1) s = rows[s](rng);
    m = agent.next_mass(s, m);
    const Intensity d = trainer.intensity(s);
    path.records.push_back({t, static_cast<std::uint32_t>(s), d, m, period_cost(c, d, m)});
  }
  return path;
}

double simulation_tv_distance(const SimulationPath& path, const ExtendedChain& chain) {
  const auto freq = path.pair_frequencies(chain.trainer().size(), chain.max_mass());
  double total = 0.0;
  double covered = 0.0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    total += std::abs(freq[i] - chain.stationary()[i]);
    covered += freq[i];
  }
  // Mass above the cap has no stationary weight.
  total += std::max(0.0, 1.0 - covered);
  return 0.5 * total;
}

double mass_tv_distance(const SimulationPath& path, const MassStats& stats) {
  const std::size_t first = path.records.size() / 2;
  const std::size_t count = path.records.size() - first;
  std::vector<double> freq(stats.mass_marginal.size(), 0.0);
  double outside = 0.0;
  for (std::size_t t = first; t < path.records.size(); ++t) {
    const auto m = static_cast<std::size_t>(path.records[t].mass);
    if (m < freq.size()) freq[m] += 1.0;
    else outside += 1.0;
  }
  double total = outside / static_cast<double>(count);
  for (std::size_t m = 0; m < freq.size(); ++m)
    total += std::abs(freq[m] / static_cast<double>(count) - stats.mass_marginal[m]);
  return 0.5 * total;
}

}  // namespace periodize
