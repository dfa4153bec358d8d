#include "periodize/markov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>

namespace periodize {

namespace {

std::string describe_classes(const std::vector<StateSet>& classes) {
  std::ostringstream out;
  out << "chain has " << classes.size() << " recurrent classes:";
  for (const auto& cls : classes) {
    out << " {";
    for (std::size_t i = 0; i < cls.size(); ++i) out << (i ? "," : "") << cls[i];
    out << "}";
  }
  return out.str();
}

}  // namespace

MultipleRecurrentClasses::MultipleRecurrentClasses(std::vector<StateSet> classes)
    : std::runtime_error(describe_classes(classes)), classes_(std::move(classes)) {}

TransitionMatrix::TransitionMatrix(Eigen::MatrixXd rows) : rows_(std::move(rows)) {
  if (rows_.rows() == 0 || rows_.rows() != rows_.cols())
    throw std::invalid_argument("transition matrix must be square and nonempty");
  for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < rows_.cols(); ++j) {
      const double v = rows_(i, j);
      if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("transition probability outside [0,1] at row " +
                                    std::to_string(i));
      sum += v;
    }
    if (std::abs(sum - 1.0) > kProbabilityTolerance)
      throw std::invalid_argument("row " + std::to_string(i) + " sums to " +
                                  std::to_string(sum));
  }
}

TransitionMatrix TransitionMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n)
      throw std::invalid_argument("transition matrix must be square");
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return TransitionMatrix(std::move(m));
}

TransitionMatrix TransitionMatrix::identity(std::size_t n) {
  const auto k = static_cast<Eigen::Index>(n);
  return TransitionMatrix(Eigen::MatrixXd::Identity(k, k));
}

std::vector<std::vector<double>> TransitionMatrix::to_rows() const {
  std::vector<std::vector<double>> out(size(), std::vector<double>(size()));
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j) out[i][j] = (*this)(i, j);
  return out;
}

Distribution::Distribution(std::vector<double> weights) : weights_(std::move(weights)) {
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw std::invalid_argument("distribution has a negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance)
    throw std::invalid_argument("distribution sums to " + std::to_string(sum));
}

double Distribution::expect(std::span<const double> values) const {
  if (values.size() != weights_.size())
    throw std::invalid_argument("expectation over mismatched support");
  return std::inner_product(weights_.begin(), weights_.end(), values.begin(), 0.0);
}

double Distribution::fixed_point_residual(const TransitionMatrix& p) const {
  const std::size_t n = p.size();
  if (n != weights_.size()) throw std::invalid_argument("size mismatch");
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double flow = 0.0;
    for (std::size_t i = 0; i < n; ++i) flow += weights_[i] * p(i, j);
    worst = std::max(worst, std::abs(flow - weights_[j]));
  }
  return worst;
}

std::vector<StateSet> recurrent_classes(const TransitionMatrix& p) {
  const std::size_t n = p.size();
  std::vector<std::vector<std::size_t>> edges(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (p(i, j) > 0.0) edges[i].push_back(j);

  // Tarjan's strongly connected components.
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0), component(n, kUnvisited);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<StateSet> components;
  std::size_t counter = 0;

  std::function<void(std::size_t)> connect = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w : edges[v]) {
      if (index[w] == kUnvisited) {
        connect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      StateSet cls;
      std::size_t w = kUnvisited;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        component[w] = components.size();
        cls.push_back(w);
      } while (w != v);
      components.push_back(std::move(cls));
    }
  };
  for (std::size_t v = 0; v < n; ++v)
    if (index[v] == kUnvisited) connect(v);

  std::vector<StateSet> closed;
  for (std::size_t k = 0; k < components.size(); ++k) {
    const bool leaks = std::any_of(components[k].begin(), components[k].end(), [&](std::size_t v) {
      return std::any_of(edges[v].begin(), edges[v].end(),
                         [&](std::size_t w) { return component[w] != k; });
    });
    if (!leaks) {
      std::sort(components[k].begin(), components[k].end());
      closed.push_back(std::move(components[k]));
    }
  }
  std::sort(closed.begin(), closed.end(),
            [](const StateSet& a, const StateSet& b) { return a.front() < b.front(); });
  return closed;
}

bool is_unichain(const TransitionMatrix& p) { return recurrent_classes(p).size() == 1; }

Distribution stationary_distribution(const TransitionMatrix& p) {
  auto classes = recurrent_classes(p);
  if (classes.size() != 1) throw MultipleRecurrentClasses(std::move(classes));
  const StateSet& cls = classes.front();
  const auto k = static_cast<Eigen::Index>(cls.size());

  // Restricted to the closed class: (P_C^T - I) x = 0 with a normalization row.
  Eigen::MatrixXd system(k + 1, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      system(i, j) = p(cls[static_cast<std::size_t>(j)], cls[static_cast<std::size_t>(i)]) -
                     (i == j ? 1.0 : 0.0);
  system.row(k).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
  rhs(k) = 1.0;
  Eigen::VectorXd x = system.colPivHouseholderQr().solve(rhs);

  std::vector<double> weights(p.size(), 0.0);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double w = std::max(0.0, x(i));
    weights[cls[static_cast<std::size_t>(i)]] = w;
    sum += w;
  }
  for (double& w : weights) w /= sum;
  return Distribution(std::move(weights));
}

double total_variation(const Distribution& a, const Distribution& b) {
  if (a.size() != b.size()) throw std::invalid_argument("size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(a[i] - b[i]);
  return 0.5 * total;
}

}  // namespace periodize
