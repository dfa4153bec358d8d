#include "periodize/agent.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include <Eigen/Dense>

#include "periodize/evaluate.hpp"
#include "periodize/trainer.hpp"

namespace periodize {

namespace {

// Preference order among equally good increments.
constexpr std::array<int, 3> kMoveOrder{0, -1, +1};
constexpr int kMaxPolicyIterations = 10000;
constexpr double kRelativeTieTolerance = 1e-10;

// Discounted extended-state problem over (s_t, m_{t-1}).
class ExtendedProblem {
 public:
  ExtendedProblem(const TrainerPolicy& trainer, const ModelParams& params, Mass cap)
      : trainer_(trainer), params_(params), cap_(cap),
        width_(static_cast<std::size_t>(cap) + 1), size_(trainer.size() * width_) {}

  std::size_t size() const { return size_; }
  std::size_t state_of(std::size_t x) const { return x / width_; }
  Mass prev_of(std::size_t x) const { return static_cast<Mass>(x % width_); }
  bool allowed(std::size_t x, int move) const {
    const Mass next = prev_of(x) + move;
    return next >= 0 && next <= cap_;
  }

  double q_value(std::size_t x, int move, const Eigen::VectorXd& value) const {
    const std::size_t s = state_of(x);
    const Mass m = prev_of(x) + move;
    double future = 0.0;
    if (params_.delta > 0.0) {
      const auto& p = trainer_.transitions();
      for (std::size_t next = 0; next < trainer_.size(); ++next) {
        const double prob = p(s, next);
        if (prob > 0.0) future += prob * value(static_cast<Eigen::Index>(next * width_ + static_cast<std::size_t>(m)));
      }
    }
    return period_cost(params_.c, trainer_.intensity(s), m) + params_.delta * future;
  }

  Eigen::VectorXd evaluate(const std::vector<int>& moves) const {
    const auto n = static_cast<Eigen::Index>(size_);
    Eigen::VectorXd cost(n);
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
    const auto& p = trainer_.transitions();
    for (std::size_t x = 0; x < size_; ++x) {
      const std::size_t s = state_of(x);
      const Mass m = prev_of(x) + moves[x];
      cost(static_cast<Eigen::Index>(x)) = period_cost(params_.c, trainer_.intensity(s), m);
      if (params_.delta == 0.0) continue;
      for (std::size_t next = 0; next < trainer_.size(); ++next) {
        const double prob = p(s, next);
        if (prob > 0.0)
          system(static_cast<Eigen::Index>(x),
                 static_cast<Eigen::Index>(next * width_ + static_cast<std::size_t>(m))) -=
              params_.delta * prob;
      }
    }
    if (params_.delta == 0.0) return cost;
    return system.partialPivLu().solve(cost);
  }

  double tolerance(const Eigen::VectorXd& value) const {
    return kRelativeTieTolerance * (1.0 + value.cwiseAbs().maxCoeff());
  }

  // First increment in preference order within tol of the minimum.
  std::pair<int, double> preferred(std::size_t x, const Eigen::VectorXd& value, double tol) const {
    std::array<double, 3> q{};
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < kMoveOrder.size(); ++k) {
      q[k] = allowed(x, kMoveOrder[k]) ? q_value(x, kMoveOrder[k], value)
                                       : std::numeric_limits<double>::infinity();
      best = std::min(best, q[k]);
    }
    for (std::size_t k = 0; k < kMoveOrder.size(); ++k)
      if (q[k] <= best + tol) return {kMoveOrder[k], best};
    return {0, best};
  }

  double min_q(std::size_t x, const Eigen::VectorXd& value) const {
    double best = std::numeric_limits<double>::infinity();
    for (int move : kMoveOrder)
      if (allowed(x, move)) best = std::min(best, q_value(x, move, value));
    return best;
  }

 private:
  const TrainerPolicy& trainer_;
  const ModelParams& params_;
  Mass cap_;
  std::size_t width_;
  std::size_t size_;
};

Mass resolve_cap(const TrainerPolicy& policy, std::optional<Mass> max_mass) {
  const Mass cap = max_mass.value_or(policy.max_intensity());
  if (cap < policy.max_intensity())
    throw InvalidCap("mass cap " + std::to_string(cap) + " is below the largest intensity " +
                     std::to_string(policy.max_intensity()));
  return cap;
}

}  // namespace

AgentPolicy::AgentPolicy(std::size_t trainer_states, Mass max_mass, std::vector<int> moves)
    : trainer_states_(trainer_states), max_mass_(max_mass), moves_(std::move(moves)) {
  if (max_mass_ < 0) throw std::invalid_argument("agent policy: negative mass cap");
  if (moves_.size() != trainer_states_ * static_cast<std::size_t>(max_mass_ + 1))
    throw std::invalid_argument("agent policy: move table has the wrong size");
  for (std::size_t x = 0; x < moves_.size(); ++x) {
    const int move = moves_[x];
    const Mass next = static_cast<Mass>(x % static_cast<std::size_t>(max_mass_ + 1)) + move;
    if (move < -1 || move > 1 || next < 0 || next > max_mass_)
      throw std::invalid_argument("agent policy: move leaves the mass range");
  }
}

Mass myopic_best_reply(Intensity d, Mass prev) {
  if (d > prev) return prev + 1;
  if (d < prev && prev > 0) return prev - 1;
  return prev;
}

AgentPolicy myopic_policy(const TrainerPolicy& policy, std::optional<Mass> max_mass) {
  const Mass cap = resolve_cap(policy, max_mass);
  std::vector<int> moves;
  moves.reserve(policy.size() * static_cast<std::size_t>(cap + 1));
  for (std::size_t s = 0; s < policy.size(); ++s)
    for (Mass m = 0; m <= cap; ++m) moves.push_back(myopic_best_reply(policy.intensity(s), m) - m);
  return AgentPolicy(policy.size(), cap, std::move(moves));
}

AgentSolution solve_agent(const TrainerPolicy& policy, const ModelParams& params,
                          std::optional<Mass> max_mass) {
  params.validate();
  const Mass cap = resolve_cap(policy, max_mass);
  const ExtendedProblem problem(policy, params, cap);

  std::vector<int> moves = myopic_policy(policy, cap).moves();
  Eigen::VectorXd value = problem.evaluate(moves);
  int iterations = 0;
  for (; iterations < kMaxPolicyIterations; ++iterations) {
    const double tol = problem.tolerance(value);
    bool changed = false;
    for (std::size_t x = 0; x < problem.size(); ++x) {
      const double current = problem.q_value(x, moves[x], value);
      const auto [move, best] = problem.preferred(x, value, tol);
      if (best < current - tol) {
        moves[x] = move;
        changed = true;
      }
    }
    if (!changed) break;
    value = problem.evaluate(moves);
  }

  // Re-apply the preference order among exact ties.
  const double tol = problem.tolerance(value);
  SolverDiagnostics diag;
  diag.iterations = iterations + 1;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t x = 0; x < problem.size(); ++x) {
    const auto [move, best] = problem.preferred(x, value, tol);
    moves[x] = move;
    diag.greedy_gap = std::max(diag.greedy_gap, problem.q_value(x, move, value) - best);
    const double diff = best - value(static_cast<Eigen::Index>(x));
    lo = std::min(lo, diff);
    hi = std::max(hi, diff);
  }
  diag.bellman_span = hi - lo;

  std::vector<double> values(value.data(), value.data() + value.size());
  return AgentSolution{AgentPolicy(policy.size(), cap, std::move(moves)), std::move(values), diag};
}

double bellman_violation(const TrainerPolicy& policy, const ModelParams& params,
                         const AgentPolicy& agent) {
  params.validate();
  const ExtendedProblem problem(policy, params, agent.max_mass());
  const Eigen::VectorXd value = problem.evaluate(agent.moves());
  double worst = 0.0;
  for (std::size_t x = 0; x < problem.size(); ++x)
    worst = std::max(worst,
                     problem.q_value(x, agent.moves()[x], value) - problem.min_q(x, value));
  return worst;
}

Mass PeriodicPlan::min_mass() const { return *std::min_element(orbit.begin(), orbit.end()); }
Mass PeriodicPlan::max_mass() const { return *std::max_element(orbit.begin(), orbit.end()); }

PeriodicPlan cyclic_best_reply(const std::vector<Intensity>& cycle, const ModelParams& params,
                               std::optional<Mass> max_mass) {
  const TrainerPolicy trainer = cycle_policy(cycle);
  AgentPolicy agent = solve_agent(trainer, params, max_mass).policy;
  const std::size_t length = cycle.size();

  // Follow the deterministic orbit from (phase 0, m = 0) until a state repeats.
  std::map<std::pair<std::size_t, Mass>, std::size_t> seen;
  std::vector<Mass> trail;
  std::size_t phase = 0;
  Mass prev = 0;
  while (!seen.contains({phase, prev})) {
    seen.emplace(std::pair{phase, prev}, trail.size());
    prev = agent.next_mass(phase, prev);
    trail.push_back(prev);
    phase = (phase + 1) % length;
  }
  const std::size_t start = seen.at({phase, prev});
  // The orbit starts at a step whose phase is start % length; rotate to phase 0.
  std::vector<Mass> orbit(trail.begin() + static_cast<std::ptrdiff_t>(start), trail.end());
  std::rotate(orbit.begin(),
              orbit.begin() + static_cast<std::ptrdiff_t>((length - start % length) % length),
              orbit.end());

  double total = 0.0;
  for (std::size_t k = 0; k < orbit.size(); ++k)
    total += period_cost(params.c, cycle[k % length], orbit[k]);

  PeriodicPlan plan{length, std::move(agent), std::move(orbit), 0, 0.0};
  plan.average_cost = total / static_cast<double>(plan.orbit.size());
  plan.orbit_count = recurrent_classes(extended_transitions(trainer, plan.policy)).size();
  return plan;
}

double agent_longrun_cost(const TrainerPolicy& policy, const AgentPolicy& agent,
                          const ModelParams& params) {
  const ExtendedChain chain = build_extended_chain(policy, agent);
  double total = 0.0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const double w = chain.stationary()[i];
    if (w == 0.0) continue;
    total += w * period_cost(params.c, policy.intensity(chain.state_of(i)), chain.mass_of(i));
  }
  return total;
}

double cycle_plan_cost(const std::vector<Intensity>& cycle, const std::vector<Mass>& masses,
                       double c) {
  if (cycle.size() != masses.size() || cycle.empty())
    throw std::invalid_argument("cycle and mass plan must have the same nonzero length");
  double total = 0.0;
  for (std::size_t k = 0; k < cycle.size(); ++k) total += period_cost(c, cycle[k], masses[k]);
  return total;
}

}  // namespace periodize
