#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace periodize {

/// Tolerance applied to row sums and distribution sums on construction.
inline constexpr double kProbabilityTolerance = 1e-12;

using StateSet = std::vector<std::size_t>;

/// Thrown when a chain that must have a unique invariant distribution has
/// more than one closed communicating class.
class MultipleRecurrentClasses : public std::runtime_error {
 public:
  explicit MultipleRecurrentClasses(std::vector<StateSet> classes);

  const std::vector<StateSet>& classes() const noexcept { return classes_; }

 private:
  std::vector<StateSet> classes_;
};

/// Row-stochastic square matrix. Entries lie in [0, 1] and every row sums to
/// one within kProbabilityTolerance; violations throw std::invalid_argument.
class TransitionMatrix {
 public:
  explicit TransitionMatrix(Eigen::MatrixXd rows);

  static TransitionMatrix from_rows(const std::vector<std::vector<double>>& rows);
  static TransitionMatrix identity(std::size_t n);

  std::size_t size() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
  double operator()(std::size_t from, std::size_t to) const {
    return rows_(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to));
  }
  const Eigen::MatrixXd& matrix() const noexcept { return rows_; }
  std::vector<std::vector<double>> to_rows() const;

  bool operator==(const TransitionMatrix& other) const { return rows_ == other.rows_; }

 private:
  Eigen::MatrixXd rows_;
};

/// Probability vector over 0..size()-1.
class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(std::vector<double> weights);

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const noexcept { return weights_; }

  /// Expectation of a per-index quantity.
  double expect(std::span<const double> values) const;

  /// Largest |(lambda P)_j - lambda_j| over j.
  double fixed_point_residual(const TransitionMatrix& p) const;

 private:
  std::vector<double> weights_;
};

/// Closed communicating classes of the graph of strictly positive
/// transitions, each sorted ascending, ordered by smallest member.
std::vector<StateSet> recurrent_classes(const TransitionMatrix& p);

bool is_unichain(const TransitionMatrix& p);

/// Unique invariant distribution of a unichain matrix. Transient states get
/// weight exactly zero. Throws MultipleRecurrentClasses otherwise.
Distribution stationary_distribution(const TransitionMatrix& p);

/// Total-variation distance between two distributions of equal size.
double total_variation(const Distribution& a, const Distribution& b);

}  // namespace periodize
