#include "feedrank/state_space.hpp"

#include <algorithm>

#include "feedrank/error.hpp"

namespace feedrank {

std::vector<std::int64_t> default_novelty_limits() {
  return {1, 2, 3, 4, 5, 6, 7, 8, 9, 20, 60};
}

void BinSpec::validate() const {
  if (novelty_limits.size() < 2) throw ConfigError("novelty limits need at least two entries");
  if (novelty_limits.front() < 0) throw ConfigError("novelty limits must be non-negative");
  for (std::size_t i = 1; i < novelty_limits.size(); ++i)
    if (novelty_limits[i] <= novelty_limits[i - 1])
      throw ConfigError("novelty limits must be strictly ascending");

  if (popularity_limits.size() < 2) throw ConfigError("popularity limits need at least two entries");
  if (popularity_limits.front() != 0) throw ConfigError("popularity limits must start at 0");
  if (popularity_limits.back() != kUnbounded)
    throw ConfigError("popularity limits must end with the unbounded sentinel");
  for (std::size_t i = 1; i < popularity_limits.size(); ++i)
    if (popularity_limits[i] < popularity_limits[i - 1])
      throw ConfigError("popularity limits must be ascending");
}

StateId state_of(BinPair bins, const BinSpec& spec) {
  if (bins.novelty == 0) return kUnknownState;
  return spec.popularity_bins() * (bins.novelty - 1) + bins.popularity;
}

BinPair bins_of(StateId state, const BinSpec& spec) {
  if (state == kUnknownState) return {};
  const int m = spec.popularity_bins();
  return {(state - 1) / m + 1, (state - 1) % m + 1};
}

std::string state_label(StateId state, const BinSpec& spec) {
  if (state == kUnknownState) return "0";
  auto [n, p] = bins_of(state, spec);
  return "(" + std::to_string(n) + "," + std::to_string(p) + ")";
}

StateId classify(std::int64_t age_minutes, std::int64_t retweet_count,
                 const BinSpec& spec) {
  const auto& nl = spec.novelty_limits;
  if (age_minutes < nl.front() || age_minutes >= nl.back()) return kUnknownState;
  // first limit strictly greater than age closes the bin
  const auto n = static_cast<int>(std::upper_bound(nl.begin(), nl.end(), age_minutes) - nl.begin());

  const auto& pl = spec.popularity_limits;
  int p = spec.popularity_bins();
  for (int j = 1; j <= spec.popularity_bins(); ++j) {
    if (retweet_count >= pl[j - 1] && retweet_count < pl[j]) {
      p = j;
      break;
    }
  }
  return state_of({n, p}, spec);
}

std::vector<std::int64_t> fit_popularity_bins(std::span<const std::int64_t> final_counts,
                                              int n_bins) {
  if (final_counts.empty()) throw DataError("no tweets to fit popularity bins");
  if (n_bins < 2) throw ConfigError("need at least two popularity bins");

  std::vector<std::int64_t> nonzero;
  for (auto c : final_counts) {
    if (c < 0) throw DataError("negative retweet count");
    if (c > 0) nonzero.push_back(c);
  }
  if (nonzero.empty()) throw DataError("degenerate popularity distribution");
  std::sort(nonzero.begin(), nonzero.end());

  const auto m = static_cast<std::int64_t>(nonzero.size());
  const std::int64_t subsets = n_bins - 1;
  std::vector<std::int64_t> limits{0, 1};
  for (std::int64_t k = 1; k < subsets; ++k) {
    const std::int64_t rank = (k * m + subsets - 1) / subsets;  // ceil(k m / subsets)
    const auto clamped = std::min(rank, m - 1);
    limits.push_back(std::max<std::int64_t>(1, nonzero[static_cast<std::size_t>(clamped)]));
  }
  limits.push_back(kUnbounded);
  return limits;
}

RewardFactors fit_rewards(const Timelines& timelines,
                          std::span<const std::size_t> training_items,
                          const BinSpec& bins) {
  bins.validate();
  if (training_items.empty()) throw DataError("empty training set for reward fitting");

  const int nn = bins.novelty_bins();
  const int np = bins.popularity_bins();
  std::vector<double> novelty(static_cast<std::size_t>(nn), 0.0);
  std::vector<double> pop_sum(static_cast<std::size_t>(np), 0.0);
  std::vector<double> pop_n(static_cast<std::size_t>(np), 0.0);

  for (auto idx : training_items) {
    const auto& item = timelines.items()[idx];
    const auto post = item.post_minute();
    for (int i = 0; i < nn; ++i) {
      const auto lo = bins.novelty_limits[static_cast<std::size_t>(i)];
      const auto hi = bins.novelty_limits[static_cast<std::size_t>(i) + 1] - 1;
      const auto received = item.retweets_through(post + hi) - item.retweets_before(post + lo);
      novelty[static_cast<std::size_t>(i)] +=
          static_cast<double>(received) / static_cast<double>(hi - lo + 1);
    }
    const auto total = item.total_retweets();
    const auto p = bins_of(classify(bins.novelty_limits.front(), total, bins), bins).popularity;
    pop_sum[static_cast<std::size_t>(p - 1)] += static_cast<double>(total);
    pop_n[static_cast<std::size_t>(p - 1)] += 1.0;
  }

  RewardFactors out;
  out.novelty.resize(novelty.size());
  const double n_items = static_cast<double>(training_items.size());
  for (std::size_t i = 0; i < novelty.size(); ++i) out.novelty[i] = novelty[i] / n_items;

  out.popularity.resize(pop_sum.size());
  for (std::size_t j = 0; j < pop_sum.size(); ++j)
    out.popularity[j] = pop_n[j] > 0 ? pop_sum[j] / pop_n[j] : 0.0;
  // the zero-retweet bin counts as an average of one retweet
  out.popularity[0] = 1.0;

  auto normalise = [](std::vector<double>& v, const char* what) {
    const double top = *std::max_element(v.begin(), v.end());
    if (!(top > 0.0)) throw DataError(std::string("degenerate ") + what + " rewards");
    for (auto& x : v) x /= top;
  };
  normalise(out.novelty, "novelty");
  normalise(out.popularity, "popularity");
  return out;
}

StateSpace::StateSpace(BinSpec bins, RewardFactors factors)
    : bins_(std::move(bins)), factors_(std::move(factors)) {
  bins_.validate();
  if (static_cast<int>(factors_.novelty.size()) != bins_.novelty_bins() ||
      static_cast<int>(factors_.popularity.size()) != bins_.popularity_bins())
    throw ConfigError("reward factor lengths do not match the bins");
  reward_.assign(static_cast<std::size_t>(bins_.state_count()), 0.0);
  for (int n = 1; n <= bins_.novelty_bins(); ++n)
    for (int p = 1; p <= bins_.popularity_bins(); ++p)
      reward_[static_cast<std::size_t>(state_of({n, p}, bins_))] =
          factors_.novelty[static_cast<std::size_t>(n - 1)] *
          factors_.popularity[static_cast<std::size_t>(p - 1)];
}

StateId StateSpace::state_at(const ItemTimeline& item, std::int64_t t) const {
  const auto age = t - item.post_minute();
  if (age < 0) return kUnknownState;
  return classify(age, item.retweets_before(t));
}

}  // namespace feedrank
