#pragma once

#include <string>
#include <vector>

#include "periodize/markov.hpp"

namespace periodize {

using Mass = int;
using Intensity = int;

/// Model parameters: intensity budget mu, maintenance cost c per unit of mass,
/// discount factor delta and the feasibility slack epsilon.
struct ModelParams {
  int mu = 1;
  double c = 0.5;
  double delta = 0.999;
  double epsilon = 0.01;

  /// Throws std::invalid_argument naming the violated invariant.
  void validate() const;

  bool operator==(const ModelParams&) const = default;
};

/// A trainer's committed program: a unichain Markov process over labelled
/// states, with a nonnegative integer intensity attached to each state.
class TrainerPolicy {
 public:
  TrainerPolicy(std::vector<std::string> labels, TransitionMatrix transitions,
                std::vector<Intensity> intensity);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const TransitionMatrix& transitions() const noexcept { return transitions_; }
  const std::vector<Intensity>& intensity() const noexcept { return intensity_; }
  Intensity intensity(std::size_t s) const { return intensity_[s]; }
  Intensity max_intensity() const;

  /// Invariant distribution of the trainer's process alone.
  const Distribution& stationary() const noexcept { return stationary_; }
  double average_intensity() const;

 private:
  std::vector<std::string> labels_;
  TransitionMatrix transitions_;
  std::vector<Intensity> intensity_;
  Distribution stationary_;
};

/// Per-period cost c*m + max(0, d - m).
inline double period_cost(double c, Intensity d, Mass m) {
  return c * m + (d > m ? static_cast<double>(d - m) : 0.0);
}

}  // namespace periodize
