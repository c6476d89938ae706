#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "feedrank/events.hpp"

namespace feedrank {

using StateId = int;

// Upper sentinel of the last popularity bin.
inline constexpr std::int64_t kUnbounded = std::numeric_limits<std::int64_t>::max();

// The unknown state: source and sink for items outside the novelty window.
inline constexpr StateId kUnknownState = 0;

std::vector<std::int64_t> default_novelty_limits();

// Bin boundaries. Novelty bin i (1-based) covers ages
// [novelty_limits[i-1], novelty_limits[i] - 1]; popularity bin j covers
// retweet counts [popularity_limits[j-1], popularity_limits[j] - 1].
struct BinSpec {
  std::vector<std::int64_t> novelty_limits = default_novelty_limits();
  std::vector<std::int64_t> popularity_limits;

  int novelty_bins() const { return static_cast<int>(novelty_limits.size()) - 1; }
  int popularity_bins() const { return static_cast<int>(popularity_limits.size()) - 1; }
  int state_count() const { return novelty_bins() * popularity_bins() + 1; }

  // Throws ConfigError when the limits are not well formed.
  void validate() const;

  bool operator==(const BinSpec&) const = default;
};

// (n, p) with n, p 1-based; state 0 maps to {0, 0}.
struct BinPair {
  int novelty = 0;
  int popularity = 0;
};

StateId state_of(BinPair bins, const BinSpec& spec);
BinPair bins_of(StateId state, const BinSpec& spec);
std::string state_label(StateId state, const BinSpec& spec);

// Total over ages >= 0 and counts >= 0. Popularity uses the first bin
// whose (non-empty) range contains the count.
StateId classify(std::int64_t age_minutes, std::int64_t retweet_count,
                 const BinSpec& spec);

// Bin 1 is exactly {0}; nonzero counts are cut into n_bins - 1 equal
// frequency subsets whose first elements become the lower limits.
std::vector<std::int64_t> fit_popularity_bins(std::span<const std::int64_t> final_counts,
                                              int n_bins = 10);

struct RewardFactors {
  std::vector<double> novelty;     // r_n, max 1
  std::vector<double> popularity;  // r_p, max 1
};

// r_n[i]: mean retweets per tweet per minute of age inside novelty bin i.
// r_p[j]: mean final retweet total of the tweets in popularity bin j, with
// the zero bin's mean taken as 1. Both normalised by their maximum.
RewardFactors fit_rewards(const Timelines& timelines,
                          std::span<const std::size_t> training_items,
                          const BinSpec& bins);

class StateSpace {
 public:
  StateSpace(BinSpec bins, RewardFactors factors);

  const BinSpec& bins() const { return bins_; }
  const RewardFactors& factors() const { return factors_; }
  int size() const { return bins_.state_count(); }
  std::span<const double> rewards() const { return reward_; }
  double reward(StateId state) const { return reward_[static_cast<std::size_t>(state)]; }

  StateId classify(std::int64_t age_minutes, std::int64_t retweet_count) const {
    return feedrank::classify(age_minutes, retweet_count, bins_);
  }

  // State of an item at decision minute t: age t - post_minute, popularity
  // from retweets strictly before t.
  StateId state_at(const ItemTimeline& item, std::int64_t t) const;

 private:
  BinSpec bins_;
  RewardFactors factors_;
  std::vector<double> reward_;
};

}  // namespace feedrank
