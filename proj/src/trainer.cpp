#include "periodize/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "periodize/agent.hpp"
#include "periodize/evaluate.hpp"

namespace periodize {

void TwoStateSpec::validate() const {
  if (d_low < 0 || d_low >= d_high)
    throw std::invalid_argument("two-state spec needs 0 <= d_low < d_high");
  if (!(alpha >= 0.0 && alpha <= 1.0 && beta >= 0.0 && beta <= 1.0))
    throw std::invalid_argument("two-state spec: alpha and beta must lie in [0, 1]");
  if (alpha == 0.0 && beta == 0.0)
    throw std::invalid_argument("two-state spec: alpha and beta cannot both be 0");
}

double TwoStateSpec::average_intensity() const {
  const double q = high_probability();
  return (1.0 - q) * d_low + q * d_high;
}

TrainerPolicy TwoStateSpec::to_policy() const {
  validate();
  return TrainerPolicy({"L", "H"},
                       TransitionMatrix::from_rows({{1.0 - alpha, alpha}, {beta, 1.0 - beta}}),
                       {d_low, d_high});
}

TrainerPolicy constant_policy(Intensity mu) {
  if (mu < 1) throw std::invalid_argument("constant policy needs mu >= 1");
  return TrainerPolicy({"C"}, TransitionMatrix::identity(1), {mu});
}

double prop1_beta(int mu, double epsilon) {
  if (mu < 1 || !(epsilon > 0.0)) throw std::invalid_argument("prop1 policy needs mu >= 1, epsilon > 0");
  // 2 mu / (1 + beta) = mu + epsilon.
  return std::max(0.0, (mu - epsilon) / (mu + epsilon));
}

TrainerPolicy prop1_policy(int mu, double epsilon) {
  return TwoStateSpec{0, 2 * mu, 1.0, prop1_beta(mu, epsilon)}.to_policy();
}

TwoStateSpec persistence_spec(Intensity d_high, double c, double high_probability) {
  const double q = high_probability;
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("high-state weight must lie in (0, 1)");
  const TwoStateSpec spec = c < 0.5 ? TwoStateSpec{0, d_high, q / (1.0 - q), 1.0}
                                    : TwoStateSpec{0, d_high, 1.0, (1.0 - q) / q};
  spec.validate();
  return spec;
}

TwoStateSpec prop2_spec(const ModelParams& params, double margin) {
  params.validate();
  const double ratio = params.mu / params.c;
  if (std::abs(ratio - std::round(ratio)) > 1e-9)
    throw NonIntegerRatio("mu / c = " + std::to_string(ratio) + " is not an integer");
  if (!(margin > 0.0 && margin < 1.0 - params.c))
    throw std::invalid_argument("margin must lie in (0, 1 - c)");
  // Average intensity is mu + margin * mu / c.
  if (margin * std::round(ratio) > params.epsilon * (1.0 + 1e-12))
    throw InfeasibleMargin("margin * mu / c = " + std::to_string(margin * ratio) +
                           " exceeds epsilon = " + std::to_string(params.epsilon));
  return persistence_spec(static_cast<Intensity>(std::lround(ratio)), params.c, params.c + margin);
}

TrainerPolicy prop2_policy(const ModelParams& params, double margin) {
  return prop2_spec(params, margin).to_policy();
}

TrainerPolicy cycle_policy(const std::vector<Intensity>& sequence) {
  if (sequence.empty()) throw std::invalid_argument("cycle must be nonempty");
  const auto n = static_cast<Eigen::Index>(sequence.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  std::vector<std::string> labels;
  for (Eigen::Index k = 0; k < n; ++k) {
    p(k, (k + 1) % n) = 1.0;
    labels.push_back("phase" + std::to_string(k));
  }
  return TrainerPolicy(std::move(labels), TransitionMatrix(std::move(p)), sequence);
}

FeasibilityResult feasibility_check(const TrainerPolicy& policy, const ModelParams& params) {
  const double average = policy.average_intensity();
  return {average <= params.mu + params.epsilon, average};
}

std::vector<double> default_probability_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 49; ++k) grid.push_back(k / 50.0);
  grid.insert(grid.end(), {0.99, 0.999, 1.0});
  return grid;
}

IntensityRange default_intensity_grid(const ModelParams& params, AgentKind kind) {
  if (kind == AgentKind::Myopic) return {0, 3 * params.mu};
  return {0, static_cast<Intensity>(std::ceil(params.mu / params.c - 1e-9)) + 2};
}

std::size_t SearchReport::count(CandidateStatus status) const {
  return static_cast<std::size_t>(std::count_if(
      table.begin(), table.end(), [&](const SearchRecord& r) { return r.status == status; }));
}

std::size_t SearchReport::property_violations() const {
  return static_cast<std::size_t>(std::count_if(table.begin(), table.end(), [](const SearchRecord& r) {
    return r.status == CandidateStatus::Evaluated && !r.properties_ok();
  }));
}

namespace {

void evaluate_candidate(SearchRecord& record, const ModelParams& params, AgentKind kind,
                        double tol) {
  const auto& spec = record.spec;
  record.average_intensity = spec.average_intensity();
  if (record.average_intensity > params.mu + params.epsilon) return;
  const TrainerPolicy policy = spec.to_policy();
  // The closed form and the invariant distribution must agree on feasibility.
  if (!feasibility_check(policy, params).feasible) return;
  record.average_intensity = policy.average_intensity();

  const AgentPolicy agent =
      kind == AgentKind::Myopic ? myopic_policy(policy) : solve_agent_mdp(policy, params);
  try {
    const ExtendedChain chain = build_extended_chain(policy, agent);
    const MassStats stats = mass_stats(chain);
    record.status = CandidateStatus::Evaluated;
    record.min_mass = stats.min_mass;
    record.max_mass = stats.max_mass;
    record.average_mass = stats.average_mass;
    record.positive_intensity = stats.positive_intensity;
  } catch (const MultipleRecurrentClasses&) {
    record.status = CandidateStatus::NotUnichain;
    return;
  }

  const double ratio = params.mu / params.c;
  if (kind == AgentKind::Myopic) {
    record.average_bound_ok = record.average_mass <= 2.0 * params.mu + tol;
    // Non-degenerate intensity: both states recurrent with different intensities.
    const bool degenerate = spec.alpha == 0.0 || spec.beta == 0.0;
    if (!degenerate) record.min_mass_bound_ok = record.min_mass <= 2 * params.mu - 1;
  } else {
    record.average_bound_ok = record.average_mass <= ratio + tol;
    if (record.min_mass >= 1) {
      record.strong_average_bound_ok = record.average_mass <= ratio - 1.0 + params.c + tol;
      record.positive_intensity_bound_ok = record.positive_intensity >= params.c - tol;
    }
  }
}

}  // namespace

SearchReport search_two_state(const ModelParams& params, AgentKind kind,
                              const SearchOptions& options) {
  params.validate();
  if (options.probabilities.empty()) throw std::invalid_argument("probability grid is empty");
  if (options.intensities.low < 0 || options.intensities.high <= options.intensities.low)
    throw std::invalid_argument("intensity grid needs 0 <= low < high");
  for (double p : options.probabilities)
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("probabilities must lie in (0, 1]");

  SearchReport report;
  report.agent = kind;
  report.params = params;
  for (Intensity lo = options.intensities.low; lo <= options.intensities.high; ++lo)
    for (Intensity hi = lo + 1; hi <= options.intensities.high; ++hi)
      for (double alpha : options.probabilities) {
        if (options.alpha_one_only && alpha != 1.0) continue;
        for (double beta : options.probabilities) report.table.push_back({TwoStateSpec{lo, hi, alpha, beta}});
      }

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(report.table.size())));
  {
    // Strided split; each worker writes only its own records.
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w)
      workers.emplace_back([&, w] {
        for (std::size_t i = w; i < report.table.size(); i += threads)
          evaluate_candidate(report.table[i], params, kind, options.tolerance);
      });
  }

  for (std::size_t i = 0; i < report.table.size(); ++i) {
    const SearchRecord& r = report.table[i];
    if (r.status != CandidateStatus::Evaluated) continue;
    const bool better =
        !report.best_index || r.min_mass > report.best_min_mass ||
        (r.min_mass == report.best_min_mass &&
         r.average_mass > report.table[*report.best_index].average_mass + 1e-12);
    if (better) {
      report.best_index = i;
      report.best_min_mass = r.min_mass;
      report.best_policy = r.spec;
    }
  }
  return report;
}

}  // namespace periodize
