#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "feedrank/events.hpp"
#include "feedrank/state_space.hpp"

namespace feedrank {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// On-display (p1) and off-display (p0) transition matrices of the
// dual-speed chain. Off-display moves are the on-display moves slowed by
// a per-state factor epsilon.
struct TransitionModel {
  Matrix p1;
  Matrix p0;
  Vector epsilon;
  double beta = 0.9;

  int size() const { return static_cast<int>(p1.rows()); }

  // Throws ConfigError / NumericalError on a malformed model.
  void validate() const;
};

// p0[i][j] = eps_i p1[i][j] for i != j; p0[i][i] = (1 - eps_i) + eps_i p1[i][i].
Matrix derive_p0(const Matrix& p1, const Vector& epsilon);

TransitionModel make_model(Matrix p1, const Vector& epsilon, double beta);
TransitionModel make_model(Matrix p1, double epsilon, double beta);

// State sequence of one item: the unknown state, then one state per minute
// of age from the first novelty limit up to and including the exit age.
using Trajectory = std::vector<StateId>;
Trajectory item_trajectory(const ItemTimeline& item, const BinSpec& bins);

Matrix count_transitions(std::span<const Trajectory> trajectories, int n_states);

// Row-normalises counts. Rows without observations become self-loops;
// smoothing adds `smoothing` to every entry of observed rows.
Matrix p1_from_counts(const Matrix& counts, double smoothing = 0.0);

// Empirical p1 from every minute-to-minute transition of the given items.
// Counting runs in parallel over items.
Matrix estimate_p1(const Timelines& timelines, std::span<const std::size_t> items,
                   const BinSpec& bins, double smoothing = 0.0);

namespace serial {
Matrix estimate_p1(const Timelines& timelines, std::span<const std::size_t> items,
                   const BinSpec& bins, double smoothing = 0.0);
}  // namespace serial

}  // namespace feedrank
