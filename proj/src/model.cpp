#include "periodize/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace periodize {

void ModelParams::validate() const {
  if (mu < 1) throw std::invalid_argument("mu must be an integer >= 1");
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("c must lie in (0, 1)");
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
}

TrainerPolicy::TrainerPolicy(std::vector<std::string> labels, TransitionMatrix transitions,
                             std::vector<Intensity> intensity)
    : labels_(std::move(labels)),
      transitions_(std::move(transitions)),
      intensity_(std::move(intensity)) {
  if (labels_.size() != transitions_.size() || intensity_.size() != transitions_.size())
    throw std::invalid_argument("trainer policy: labels, matrix and intensities differ in size");
  if (std::any_of(intensity_.begin(), intensity_.end(), [](Intensity d) { return d < 0; }))
    throw std::invalid_argument("trainer policy: intensities must be nonnegative");
  stationary_ = stationary_distribution(transitions_);
}

Intensity TrainerPolicy::max_intensity() const {
  return *std::max_element(intensity_.begin(), intensity_.end());
}

double TrainerPolicy::average_intensity() const {
  double total = 0.0;
  for (std::size_t s = 0; s < size(); ++s) total += stationary_[s] * intensity_[s];
  return total;
}

}  // namespace periodize
