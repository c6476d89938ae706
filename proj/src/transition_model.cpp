#include "feedrank/transition_model.hpp"

#include <cmath>
#include <string>

#include <omp.h>

#include "feedrank/error.hpp"

namespace feedrank {

void TransitionModel::validate() const {
  const auto n = p1.rows();
  if (n == 0 || p1.cols() != n || p0.rows() != n || p0.cols() != n || epsilon.size() != n)
    throw ConfigError("transition model dimensions disagree");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0, 1)");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(epsilon(i) >= 0.0 && epsilon(i) <= 1.0))
      throw ConfigError("epsilon must lie in [0, 1]");
    for (const Matrix* m : {&p1, &p0}) {
      if ((m->row(i).array() < 0.0).any() || (m->row(i).array() > 1.0).any())
        throw NumericalError("transition probability outside [0, 1] in row " + std::to_string(i));
      if (std::abs(m->row(i).sum() - 1.0) > 1e-9)
        throw NumericalError("transition row " + std::to_string(i) + " is not stochastic");
    }
  }
}

Matrix derive_p0(const Matrix& p1, const Vector& epsilon) {
  if (p1.rows() != p1.cols() || epsilon.size() != p1.rows())
    throw ConfigError("epsilon length must match the transition matrix");
  Matrix p0(p1.rows(), p1.cols());
  for (Eigen::Index i = 0; i < p1.rows(); ++i) {
    const double eps = epsilon(i);
    if (!(eps >= 0.0 && eps <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
    for (Eigen::Index j = 0; j < p1.cols(); ++j)
      p0(i, j) = i == j ? (1.0 - eps) + eps * p1(i, j) : eps * p1(i, j);
  }
  return p0;
}

TransitionModel make_model(Matrix p1, const Vector& epsilon, double beta) {
  TransitionModel model;
  model.p0 = derive_p0(p1, epsilon);
  model.p1 = std::move(p1);
  model.epsilon = epsilon;
  model.beta = beta;
  model.validate();
  return model;
}

TransitionModel make_model(Matrix p1, double epsilon, double beta) {
  const auto n = p1.rows();
  return make_model(std::move(p1), Vector::Constant(n, epsilon), beta);
}

Trajectory item_trajectory(const ItemTimeline& item, const BinSpec& bins) {
  const auto first = bins.novelty_limits.front();
  const auto exit = bins.novelty_limits.back();
  const auto post = item.post_minute();
  Trajectory path;
  path.reserve(static_cast<std::size_t>(exit - first + 2));
  path.push_back(kUnknownState);
  for (auto age = first; age <= exit; ++age)
    path.push_back(classify(age, item.retweets_before(post + age), bins));
  return path;
}

Matrix count_transitions(std::span<const Trajectory> trajectories, int n_states) {
  Matrix counts = Matrix::Zero(n_states, n_states);
  for (const auto& path : trajectories)
    for (std::size_t k = 0; k + 1 < path.size(); ++k) counts(path[k], path[k + 1]) += 1.0;
  return counts;
}

Matrix p1_from_counts(const Matrix& counts, double smoothing) {
  if (smoothing < 0.0) throw ConfigError("smoothing must be non-negative");
  const auto n = counts.rows();
  Matrix p1 = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double total = counts.row(i).sum();
    if (total <= 0.0) {
      p1(i, i) = 1.0;
      continue;
    }
    const double denom = total + smoothing * static_cast<double>(n);
    p1.row(i) = (counts.row(i).array() + smoothing) / denom;
  }
  return p1;
}

namespace {

void check_items(std::span<const std::size_t> items, const BinSpec& bins) {
  bins.validate();
  if (items.empty()) throw DataError("training window contains no posts");
}

}  // namespace

Matrix estimate_p1(const Timelines& timelines, std::span<const std::size_t> items,
                   const BinSpec& bins, double smoothing) {
  check_items(items, bins);
  const int n = bins.state_count();
  const auto count = static_cast<std::int64_t>(items.size());
  Matrix counts = Matrix::Zero(n, n);

#pragma omp parallel
  {
    Matrix local = Matrix::Zero(n, n);
#pragma omp for schedule(static)
    for (std::int64_t k = 0; k < count; ++k) {
      const auto path = item_trajectory(timelines.items()[items[static_cast<std::size_t>(k)]], bins);
      for (std::size_t s = 0; s + 1 < path.size(); ++s) local(path[s], path[s + 1]) += 1.0;
    }
#pragma omp critical
    counts += local;
  }
  return p1_from_counts(counts, smoothing);
}

namespace serial {

Matrix estimate_p1(const Timelines& timelines, std::span<const std::size_t> items,
                   const BinSpec& bins, double smoothing) {
  check_items(items, bins);
  std::vector<Trajectory> paths;
  paths.reserve(items.size());
  for (auto idx : items) paths.push_back(item_trajectory(timelines.items()[idx], bins));
  return p1_from_counts(count_transitions(paths, bins.state_count()), smoothing);
}

}  // namespace serial

}  // namespace feedrank
