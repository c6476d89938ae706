#include "feedrank/index_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/LU>

#include "feedrank/error.hpp"

namespace feedrank {

StateSet all_states(int n) { return StateSet(static_cast<std::size_t>(n), true); }
StateSet no_states(int n) { return StateSet(static_cast<std::size_t>(n), false); }

StateSet complement(const StateSet& set) {
  StateSet out(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) out[i] = !set[i];
  return out;
}

namespace {

void check_set(const StateSet& set, const TransitionModel& model) {
  if (static_cast<int>(set.size()) != model.size())
    throw ConfigError("state set size does not match the model");
}

}  // namespace

Vector occupancy(const StateSet& active, const TransitionModel& model) {
  check_set(active, model);
  const double beta = model.beta;
  if (!(beta < 1.0)) throw NumericalError("occupancy needs beta < 1");
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");

  const auto n = static_cast<Eigen::Index>(model.size());
  Matrix system(n, n);
  Vector rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool on = active[static_cast<std::size_t>(i)];
    system.row(i) = -beta * (on ? model.p1.row(i) : model.p0.row(i));
    system(i, i) += 1.0;
    rhs(i) = on ? 1.0 : 0.0;
  }

  Eigen::PartialPivLU<Matrix> lu(system);
  Vector v = lu.solve(rhs);
  const double tolerance = 1e-10 / (1.0 - beta);
  double residual = (rhs - system * v).cwiseAbs().maxCoeff();
  for (int pass = 0; pass < 3 && residual > tolerance; ++pass) {
    v += lu.solve(rhs - system * v);
    residual = (rhs - system * v).cwiseAbs().maxCoeff();
  }
  if (!(residual <= tolerance)) {
    std::ostringstream msg;
    msg << "occupancy solve failed: residual " << residual << " exceeds " << tolerance;
    throw NumericalError(msg.str());
  }
  return v;
}

Vector constants_a(const StateSet& set, const TransitionModel& model) {
  check_set(set, model);
  const Vector rest = occupancy(complement(set), model);
  return Vector::Ones(model.size()) + model.beta * (model.p1 * rest) - model.beta * (model.p0 * rest);
}

IndexTable compute_indices(const TransitionModel& model, std::span<const double> rewards) {
  model.validate();
  const int n = model.size();
  if (static_cast<int>(rewards.size()) != n)
    throw ConfigError("reward vector length does not match the model");

  IndexTable table;
  table.g.assign(static_cast<std::size_t>(n), 0.0);
  table.order.reserve(static_cast<std::size_t>(n));
  table.y.reserve(static_cast<std::size_t>(n));

  StateSet remaining = all_states(n);
  // sum over the sets already processed of A_i^T * y^T
  std::vector<double> charged(static_cast<std::size_t>(n), 0.0);
  double running = 0.0;

  for (int step = 0; step < n; ++step) {
    // The first set is E itself: its complement is empty and A^E = 1.
    const Vector a = step == 0 ? Vector::Ones(n) : constants_a(remaining, model);

    std::vector<double> ratio(static_cast<std::size_t>(n), 0.0);
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const auto si = static_cast<std::size_t>(i);
      if (!remaining[si]) continue;
      if (!(a(i) > 0.0)) {
        std::ostringstream msg;
        msg << "indexability violation: A_" << i << " = " << a(i) << " on a set of "
            << std::count(remaining.begin(), remaining.end(), true) << " states at step "
            << step + 1;
        throw NumericalError(msg.str());
      }
      ratio[si] = (rewards[si] - charged[si]) / a(i);
      best = std::max(best, ratio[si]);
    }

    const double slack = 1e-12 * std::max(1.0, std::abs(best));
    int pick = -1;
    for (int i = 0; i < n && pick < 0; ++i)
      if (remaining[static_cast<std::size_t>(i)] && ratio[static_cast<std::size_t>(i)] >= best - slack)
        pick = i;
    const double y = ratio[static_cast<std::size_t>(pick)];

    for (int i = 0; i < n; ++i)
      if (remaining[static_cast<std::size_t>(i)]) charged[static_cast<std::size_t>(i)] += a(i) * y;

    running = step == 0 ? y : running + y;
    table.g[static_cast<std::size_t>(pick)] = running;
    table.order.push_back(pick);
    table.y.push_back(y);
    remaining[static_cast<std::size_t>(pick)] = false;
  }
  return table;
}

std::vector<double> replay_indices(std::span<const StateId> order, std::span<const double> y) {
  if (order.size() != y.size()) throw ConfigError("order and increments differ in length");
  std::vector<double> g(order.size(), 0.0);
  double running = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    running = k == 0 ? y[k] : running + y[k];
    g[static_cast<std::size_t>(order[k])] = running;
  }
  return g;
}

std::vector<StateId> rank_states(const IndexTable& table) {
  std::vector<StateId> states(table.g.size());
  std::iota(states.begin(), states.end(), 0);
  std::stable_sort(states.begin(), states.end(), [&](StateId a, StateId b) {
    return table.g[static_cast<std::size_t>(a)] > table.g[static_cast<std::size_t>(b)];
  });
  return states;
}

std::vector<IndexTable> compute_indices_sweep(const TransitionModel& model,
                                              std::span<const double> rewards,
                                              std::span<const double> betas) {
  std::vector<IndexTable> out(betas.size());
  std::vector<std::string> errors(betas.size());
  const auto count = static_cast<std::int64_t>(betas.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < count; ++k) {
    const auto sk = static_cast<std::size_t>(k);
    try {
      TransitionModel local = model;
      local.beta = betas[sk];
      out[sk] = compute_indices(local, rewards);
    } catch (const std::exception& e) {
      errors[sk] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw NumericalError(e);
  return out;
}

namespace serial {

std::vector<IndexTable> compute_indices_sweep(const TransitionModel& model,
                                              std::span<const double> rewards,
                                              std::span<const double> betas) {
  std::vector<IndexTable> out;
  out.reserve(betas.size());
  for (double beta : betas) {
    TransitionModel local = model;
    local.beta = beta;
    out.push_back(compute_indices(local, rewards));
  }
  return out;
}

}  // namespace serial

}  // namespace feedrank
