#pragma once

#include <random>
#include <vector>

#include "feedrank/transition_model.hpp"

namespace feedrank::fixture {

// Row-stochastic matrix with exponential (flat Dirichlet) rows.
inline Matrix random_stochastic(int n, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  Matrix p(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) p(i, j) = e(rng);
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

inline std::vector<double> random_rewards(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> r(static_cast<std::size_t>(n));
  for (auto& x : r) x = u(rng);
  return r;
}

}  // namespace feedrank::fixture
