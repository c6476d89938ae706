#pragma once

#include <span>
#include <string>
#include <vector>

#include "feedrank/transition_model.hpp"

namespace feedrank {

// Membership mask over the states of a model.
using StateSet = std::vector<bool>;

StateSet all_states(int n);
StateSet no_states(int n);
StateSet complement(const StateSet& set);

// Expected discounted time spent in `active` when the item is displayed
// exactly while its state is in `active`:
//   V_i = [i in S] + beta * sum_j P^{a(i)}_ij V_j,  a(i) = [i in S].
// Solved densely with partial pivoting plus iterative refinement.
// Throws NumericalError if beta >= 1 or the residual stays above
// 1e-10 / (1 - beta).
Vector occupancy(const StateSet& active, const TransitionModel& model);

// A_i^S = 1 + beta sum_j P1_ij V_j^{S^c} - beta sum_j P0_ij V_j^{S^c}.
Vector constants_a(const StateSet& set, const TransitionModel& model);

struct IndexTable {
  std::vector<double> g;         // index per state
  std::vector<StateId> order;    // extraction order, highest index first
  std::vector<double> y;         // increment attached to each extraction step

  int size() const { return static_cast<int>(g.size()); }
};

// Adaptive greedy index computation. Starting from the full state set,
// each step picks the state maximising
//   (r_i - sum over earlier sets T of A_i^T y^T) / A_i^S
// (lowest state index on ties), records the maximum as y^S, and removes
// the state. Indices are running sums of y along the extraction order.
// Throws NumericalError("indexability violation ...") if some A_i^S <= 0.
IndexTable compute_indices(const TransitionModel& model, std::span<const double> rewards);

// Rebuilds g from order and y.
std::vector<double> replay_indices(std::span<const StateId> order, std::span<const double> y);

// States by descending index; equal indices keep ascending state order.
std::vector<StateId> rank_states(const IndexTable& table);

// Independent index computations for several discount factors, run in
// parallel.
std::vector<IndexTable> compute_indices_sweep(const TransitionModel& model,
                                              std::span<const double> rewards,
                                              std::span<const double> betas);

namespace serial {
std::vector<IndexTable> compute_indices_sweep(const TransitionModel& model,
                                              std::span<const double> rewards,
                                              std::span<const double> betas);
}  // namespace serial

}  // namespace feedrank
