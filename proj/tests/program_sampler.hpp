// Seeded generator of random unichain trainer programs.
#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "periodize/markov.hpp"
#include "periodize/model.hpp"

namespace periodize::testing {

class ProgramSampler {
 public:
  explicit ProgramSampler(std::uint64_t seed) : rng_(seed) {}

  // Random unichain program with 2..4 states and intensities in 0..max_level.
  TrainerPolicy next(int max_level = 8) {
    std::uniform_int_distribution<std::size_t> states(2, 4);
    std::uniform_int_distribution<int> level(0, max_level);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (;;) {
      const std::size_t n = states(rng_);
      std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
      for (auto& row : rows) {
        double sum = 0.0;
        for (double& v : row) {
          v = unit(rng_) < 0.3 ? 0.0 : unit(rng_);
          sum += v;
        }
        if (sum == 0.0) {
          row[0] = 1.0;
          sum = 1.0;
        }
        for (double& v : row) v /= sum;
        std::size_t last = n - 1;
        while (row[last] == 0.0) --last;
        double head = 0.0;
        for (std::size_t j = 0; j < last; ++j) head += row[j];
        row[last] = 1.0 - head;
      }
      auto p = TransitionMatrix::from_rows(rows);
      if (!is_unichain(p)) continue;
      std::vector<Intensity> d(n);
      for (auto& x : d) x = level(rng_);
      if (*std::max_element(d.begin(), d.end()) == 0) d[0] = 1;
      std::vector<std::string> labels;
      for (std::size_t i = 0; i < n; ++i) labels.push_back("s" + std::to_string(i));
      return TrainerPolicy(std::move(labels), std::move(p), std::move(d));
    }
  }

  ModelParams params(double delta) {
    std::uniform_real_distribution<double> cost(0.05, 0.95);
    std::uniform_int_distribution<int> budget(1, 4);
    return ModelParams{budget(rng_), cost(rng_), delta, 0.01};
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace periodize::testing
