// Seeded property suites over randomly drawn programs.

#include <algorithm>
#include <random>

#include "doctest.h"
#include "periodize/agent.hpp"
#include "periodize/evaluate.hpp"
#include "periodize/trainer.hpp"
#include "program_sampler.hpp"

using namespace periodize;
using periodize::testing::ProgramSampler;

namespace {

constexpr int kCases = 200;

bool consecutive(const MassStats& stats) {
  for (Mass m = stats.min_mass; m <= stats.max_mass; ++m)
    if (stats.mass_marginal[static_cast<std::size_t>(m)] <= kSupportThreshold) return false;
  return true;
}

}  // namespace

TEST_CASE("flow identity holds on myopic extended chains") {
  ProgramSampler sampler(101);
  int checked = 0;
  while (checked < kCases) {
    const TrainerPolicy trainer = sampler.next();
    try {
      const ExtendedChain chain = build_extended_chain(trainer, myopic_policy(trainer));
      CHECK(flow_identity_residual(chain) < 1e-9);
      ++checked;
    } catch (const MultipleRecurrentClasses&) {
    }
  }
}

TEST_CASE("stationary fixed point residual") {
  ProgramSampler sampler(202);
  int checked = 0;
  while (checked < kCases) {
    const TrainerPolicy trainer = sampler.next();
    CHECK(trainer.stationary().fixed_point_residual(trainer.transitions()) < 1e-12);
    try {
      const ExtendedChain chain = build_extended_chain(trainer, myopic_policy(trainer));
      CHECK(chain.stationary().fixed_point_residual(chain.transitions()) < 1e-12);
      ++checked;
    } catch (const MultipleRecurrentClasses&) {
    }
  }
}

TEST_CASE("recurrent masses are consecutive") {
  ProgramSampler sampler(303);
  int checked = 0;
  while (checked < kCases) {
    const TrainerPolicy trainer = sampler.next();
    const ModelParams params = sampler.params(checked % 2 ? 0.95 : 0.0);
    try {
      const ExtendedChain chain = build_extended_chain(trainer, solve_agent_mdp(trainer, params));
      CHECK(consecutive(mass_stats(chain)));
      ++checked;
    } catch (const MultipleRecurrentClasses&) {
    }
  }
}

TEST_CASE("delta = 0 solution equals the myopic rule") {
  ProgramSampler sampler(404);
  for (int k = 0; k < kCases; ++k) {
    const TrainerPolicy trainer = sampler.next();
    const ModelParams params = sampler.params(0.0);
    const AgentPolicy solved = solve_agent_mdp(trainer, params);
    const AgentPolicy myopic = myopic_policy(trainer);
    CHECK(solved == myopic);
    for (std::size_t s = 0; s < trainer.size(); ++s)
      for (Mass m = 0; m <= solved.max_mass(); ++m)
        CHECK(solved.next_mass(s, m) == myopic_best_reply(trainer.intensity(s), m));
  }
}

TEST_CASE("simulation is determined by the seed") {
  ProgramSampler sampler(505);
  std::uniform_int_distribution<std::uint64_t> seeds;
  for (int k = 0; k < kCases; ++k) {
    const TrainerPolicy trainer = sampler.next();
    const AgentPolicy agent = myopic_policy(trainer);
    const std::uint64_t seed = seeds(sampler.rng());
    const SimulationPath a = simulate(trainer, agent, k % 5, 500, seed, 0.3);
    const SimulationPath b = simulate(trainer, agent, k % 5, 500, seed, 0.3);
    bool same = a.length() == b.length();
    for (std::size_t t = 0; same && t < a.length(); ++t)
      same = a.records[t].state == b.records[t].state && a.records[t].mass == b.records[t].mass &&
             a.records[t].intensity == b.records[t].intensity && a.records[t].cost == b.records[t].cost;
    CHECK(same);
    Mass prev = k % 5;
    for (const auto& r : a.records) {
      CHECK(std::abs(r.mass - prev) <= 1);
      prev = r.mass;
    }
  }
}

TEST_CASE("solved replies satisfy the Bellman equation and never overshoot") {
  ProgramSampler sampler(606);
  for (int k = 0; k < kCases; ++k) {
    const TrainerPolicy trainer = sampler.next(6);
    const ModelParams params = sampler.params(k % 3 == 0 ? 0.999 : 0.9);
    const Mass cap = trainer.max_intensity() + 2;
    const AgentSolution solution = solve_agent(trainer, params, cap);
    CHECK(bellman_violation(trainer, params, solution.policy) < 1e-8);
    CHECK(solution.diagnostics.bellman_span < 1e-8);
    for (std::size_t s = 0; s < trainer.size(); ++s)
      for (Mass m = trainer.max_intensity(); m <= cap; ++m) CHECK(solution.policy.move(s, m) <= 0);
  }
}

TEST_CASE("myopic average mass stays within 2 mu on feasible programs") {
  ProgramSampler sampler(707);
  int checked = 0;
  while (checked < kCases) {
    const TrainerPolicy trainer = sampler.next();
    const ModelParams params = sampler.params(0.0);
    if (!feasibility_check(trainer, params).feasible) continue;
    try {
      const ExtendedChain chain = build_extended_chain(trainer, myopic_policy(trainer));
      const MassStats stats = mass_stats(chain);
      CHECK(stats.average_mass <= 2.0 * params.mu + 1e-6);
      CHECK(std::abs(stats.average_intensity - feasibility_check(trainer, params).average_intensity) < 1e-12);
      // Non-degenerate intensity law.
      const Distribution& lambda = trainer.stationary();
      bool spread = false;
      for (std::size_t s = 0; s < trainer.size(); ++s)
        for (std::size_t t = 0; t < trainer.size(); ++t)
          spread |= lambda[s] > kSupportThreshold && lambda[t] > kSupportThreshold &&
                    trainer.intensity(s) != trainer.intensity(t);
      if (spread) CHECK(stats.min_mass <= 2 * params.mu - 1);
      ++checked;
    } catch (const MultipleRecurrentClasses&) {
    }
  }
}

TEST_CASE("patient replies keep the intensity positive often enough") {
  ProgramSampler sampler(808);
  int checked = 0;
  int attempts = 0;
  while (checked < kCases && attempts < 20000) {
    ++attempts;
    const TrainerPolicy trainer = sampler.next();
    const ModelParams params = sampler.params(0.999);
    if (!feasibility_check(trainer, params).feasible) continue;
    try {
      const ExtendedChain chain = build_extended_chain(trainer, solve_agent_mdp(trainer, params));
      const MassStats stats = mass_stats(chain);
      ++checked;
      if (stats.min_mass >= 1) CHECK(stats.positive_intensity >= params.c - 1e-6);
      CHECK(stats.average_mass <= params.mu / params.c + params.epsilon / params.c + 1e-6);
    } catch (const MultipleRecurrentClasses&) {
    }
  }
  CHECK(checked == kCases);
}
