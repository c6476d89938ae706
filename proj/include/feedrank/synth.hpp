#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "feedrank/events.hpp"
#include "feedrank/state_space.hpp"
#include "feedrank/transition_model.hpp"

namespace feedrank {

struct GeneratorConfig {
  std::uint64_t seed = 1;
  std::int64_t start_ts = 1388966400;  // Monday 2014-01-06 00:00 UTC
  int days = 30;
  int n_accounts = 20;
  double posts_per_day = 500.0;
  double weekend_factor = 0.7;
  // Relative posting rate per UTC hour; busiest from 12:00 to 02:00.
  std::array<double, 24> hour_weights{0.6, 0.5, 0.3, 0.2, 0.15, 0.1, 0.1, 0.1, 0.15, 0.2,
                                      0.3, 0.45, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0,
                                      1.0, 1.0, 1.0, 0.8};
  // Retweet magnitude: a point mass at zero, otherwise a discrete power law
  // P(k) ~ k^-alpha for k >= x_min, truncated at max_magnitude.
  double zero_fraction = 0.1;
  double alpha = 1.9;
  std::int64_t x_min = 20;
  std::int64_t max_magnitude = 400;
  // Per-minute retweet intensity: explicit weights for minutes 1..3, then
  // head_weights[2] * (m / 3)^-gamma.
  std::array<double, 3> head_weights{0.35, 1.0, 0.95};
  double gamma = 1.0;
  double jitter_sigma = 0.5;  // log-normal multiplicative jitter on minute weights
  double reply_rate = 0.1;     // replies per retweet
  double favorite_rate = 0.6;  // favorites per retweet

  // Throws ConfigError.
  void validate() const;
};

// Exact draw from the discrete power law k^-alpha, k >= x_min.
std::int64_t draw_power_law(std::mt19937_64& rng, double alpha, std::int64_t x_min);

// Relative retweet intensity for minutes 1..60 after posting (sums to 1).
std::array<double, 60> decay_profile(const GeneratorConfig& config);

// Events sorted by (ts, kind, event_id). Deterministic in the config.
// Throws DataError if no posts are produced.
std::vector<Event> generate_stream(const GeneratorConfig& config);

namespace serial {
std::vector<Event> generate_stream(const GeneratorConfig& config);
}  // namespace serial

struct MarkovStreamConfig {
  std::uint64_t seed = 1;
  std::int64_t n_items = 1000;
  std::int64_t start_minute = 23148000;  // 2014-01-06 00:00 UTC
  std::int64_t minutes_between_posts = 1;
};

// Items whose state sequences walk `p1`. At each age step the next state is
// drawn from the current row restricted to states of the novelty bin that
// the next age falls in; each step emits the fewest retweets that reach the
// drawn popularity bin. Throws ConfigError when p1 moves any state to a
// lower popularity bin or leaves no reachable successor.
std::vector<Event> generate_markov_stream(const BinSpec& bins, const Matrix& p1,
                                          const MarkovStreamConfig& config);

}  // namespace feedrank
