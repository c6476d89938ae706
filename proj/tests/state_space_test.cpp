#include <algorithm>
#include <random>

#include "doctest.h"
#include "feedrank/error.hpp"
#include "feedrank/state_space.hpp"
#include "oracles.hpp"
#include "published_fixtures.hpp"

using namespace feedrank;

TEST_CASE("fit_popularity_bins on a small list matches the subset oracle") {
  const std::vector<std::int64_t> counts{0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto limits = fit_popularity_bins(counts, 10);
  CHECK(limits == oracle::popularity_limits(counts, 10));
  // frozen from the oracle: bin 1 = {0}, bin 2 = {1, 2}, then one count each
  CHECK(limits == std::vector<std::int64_t>{0, 1, 3, 4, 5, 6, 7, 8, 9, 10, kUnbounded});
}

TEST_CASE("fit_popularity_bins agrees with the oracle on random corpora") {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 300; ++round) {
    std::uniform_int_distribution<int> size(1, 400);
    std::geometric_distribution<std::int64_t> count(0.05);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(size(rng)));
    for (auto& c : counts) c = count(rng);
    counts.push_back(1 + count(rng));  // at least one nonzero
    const int n_bins = 2 + round % 12;
    const auto limits = fit_popularity_bins(counts, n_bins);
    REQUIRE(limits == oracle::popularity_limits(counts, n_bins));
    CHECK(limits.size() == static_cast<std::size_t>(n_bins + 1));
    CHECK(std::is_sorted(limits.begin(), limits.end()));
  }
}

TEST_CASE("fit_popularity_bins degenerate inputs") {
  CHECK_THROWS_AS(fit_popularity_bins(std::vector<std::int64_t>{0, 0, 0}), DataError);
  CHECK_THROWS_AS(fit_popularity_bins(std::vector<std::int64_t>{}), DataError);

  const std::vector<std::int64_t> fives(20, 5);
  BinSpec bins;
  bins.popularity_limits = fit_popularity_bins(fives, 10);
  for (std::size_t j = 2; j + 1 < bins.popularity_limits.size(); ++j) CHECK(bins.popularity_limits[j] == 5);
  // first non-empty bin covering 5 is the last one
  CHECK(bins_of(classify(1, 5, bins), bins).popularity == 10);
  CHECK(bins_of(classify(1, 3, bins), bins).popularity == 2);
}

TEST_CASE("classify with the published bins") {
  const auto bins = fixture::published_bins();
  CHECK(classify(61, 0, bins) == kUnknownState);
  CHECK(classify(61, 500, bins) == kUnknownState);
  CHECK(classify(60, 3, bins) == kUnknownState);
  CHECK(classify(0, 3, bins) == kUnknownState);
  CHECK(classify(1, 0, bins) == state_of({1, 1}, bins));
  CHECK(state_of({1, 1}, bins) == 1);
  CHECK(classify(10, 150, bins) == state_of({9, 10}, bins));
  CHECK(state_of({9, 10}, bins) == 90);
  CHECK(classify(59, 18, bins) == state_of({10, 2}, bins));
  CHECK(classify(19, 19, bins) == state_of({9, 3}, bins));
  CHECK(classify(20, 131, bins) == state_of({10, 10}, bins));
  CHECK(state_label(90, bins) == "(9,10)");
  CHECK(state_label(0, bins) == "0");
}

TEST_CASE("classify is total and monotone") {
  const auto bins = fixture::published_bins();
  for (std::int64_t count = 0; count < 400; count += 3) {
    int last_n = 0;
    for (std::int64_t age = 0; age < 80; ++age) {
      const auto s = classify(age, count, bins);
      REQUIRE(s >= 0);
      REQUIRE(s < bins.state_count());
      const auto n = bins_of(s, bins).novelty;
      if (s != kUnknownState) {
        CHECK(n >= last_n);
        last_n = n;
      }
    }
  }
  for (std::int64_t age = 1; age < 60; ++age) {
    int last_p = 0;
    for (std::int64_t count = 0; count < 400; ++count) {
      const auto p = bins_of(classify(age, count, bins), bins).popularity;
      CHECK(p >= last_p);
      last_p = p;
    }
  }
}

TEST_CASE("state indexing round trips") {
  const auto bins = fixture::published_bins();
  for (StateId s = 0; s < bins.state_count(); ++s) CHECK(state_of(bins_of(s, bins), bins) == s);
}

TEST_CASE("published reward vectors peak at (2,10)") {
  const StateSpace space(fixture::published_bins(), fixture::published_rewards());
  CHECK(space.size() == 101);
  CHECK(space.reward(0) == 0.0);
  const auto r = space.rewards();
  for (double v : r) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  const auto best = std::max_element(r.begin(), r.end()) - r.begin();
  CHECK(best == state_of({2, 10}, space.bins()));
  CHECK(space.reward(static_cast<StateId>(best)) == doctest::Approx(1.0));
}

namespace {

Timelines corpus_from(const std::vector<std::vector<std::int64_t>>& retweet_ages) {
  std::vector<Event> events;
  for (std::size_t i = 0; i < retweet_ages.size(); ++i) {
    const std::string id = "t" + std::to_string(i);
    const std::int64_t post = static_cast<std::int64_t>(i) * 1000 * 60;
    events.push_back({EventKind::kPost, id, id, post, ""});
    for (std::size_t k = 0; k < retweet_ages[i].size(); ++k)
      events.push_back({EventKind::kRetweet, id, id + "-" + std::to_string(k),
                        post + retweet_ages[i][k] * 60 + 30, ""});
  }
  return build_timelines(events);
}

std::vector<std::size_t> all_items(const Timelines& tl) {
  std::vector<std::size_t> out(tl.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

}  // namespace

TEST_CASE("fit_rewards: one retweet in the first minute of age") {
  const auto tl = corpus_from(std::vector<std::vector<std::int64_t>>(50, {1}));
  BinSpec bins;
  std::vector<std::int64_t> totals(50, 1);
  bins.popularity_limits = fit_popularity_bins(totals);
  const auto f = fit_rewards(tl, all_items(tl), bins);
  CHECK(f.novelty == std::vector<double>{1, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  CHECK(f.popularity.front() == 1.0);
}

TEST_CASE("fit_rewards matches a per-event brute force") {
  std::mt19937_64 rng(5);
  std::geometric_distribution<int> how_many(0.1);
  std::uniform_int_distribution<std::int64_t> age(0, 70);
  std::vector<std::vector<std::int64_t>> ages(300);
  for (auto& a : ages)
    for (int k = how_many(rng); k > 0; --k) a.push_back(age(rng));
  const auto tl = corpus_from(ages);

  std::vector<std::int64_t> totals;
  for (const auto& a : ages) totals.push_back(static_cast<std::int64_t>(a.size()));
  BinSpec bins;
  bins.popularity_limits = fit_popularity_bins(totals);
  const auto f = fit_rewards(tl, all_items(tl), bins);

  const auto& nl = bins.novelty_limits;
  std::vector<double> rn(10, 0.0);
  for (const auto& a : ages)
    for (auto x : a)
      for (std::size_t i = 0; i < 10; ++i)
        if (x >= nl[i] && x < nl[i + 1]) rn[i] += 1.0 / static_cast<double>(nl[i + 1] - nl[i]);
  const double top = *std::max_element(rn.begin(), rn.end());
  for (std::size_t i = 0; i < 10; ++i) CHECK(f.novelty[i] == doctest::Approx(rn[i] / top).epsilon(1e-12));

  std::vector<double> sum(10, 0.0), n(10, 0.0);
  const auto& pl = bins.popularity_limits;
  for (auto c : totals)
    for (std::size_t j = 0; j < 10; ++j)
      if (c >= pl[j] && c < pl[j + 1]) {
        sum[j] += static_cast<double>(c);
        n[j] += 1;
        break;
      }
  std::vector<double> rp(10);
  for (std::size_t j = 0; j < 10; ++j) rp[j] = n[j] > 0 ? sum[j] / n[j] : 0.0;
  rp[0] = 1.0;
  const double top_p = *std::max_element(rp.begin(), rp.end());
  for (std::size_t j = 0; j < 10; ++j) CHECK(f.popularity[j] == doctest::Approx(rp[j] / top_p).epsilon(1e-12));
}

TEST_CASE("fit_rewards rejects empty training sets") {
  const auto tl = corpus_from({{1}});
  BinSpec bins = fixture::published_bins();
  CHECK_THROWS_AS(fit_rewards(tl, {}, bins), DataError);
}

TEST_CASE("BinSpec validation") {
  BinSpec bins = fixture::published_bins();
  CHECK_NOTHROW(bins.validate());
  bins.novelty_limits = {1, 2, 2, 4};
  CHECK_THROWS_AS(bins.validate(), ConfigError);
  bins = fixture::published_bins();
  bins.popularity_limits.back() = 1000;
  CHECK_THROWS_AS(bins.validate(), ConfigError);
}

TEST_CASE("state_at reads popularity strictly before t") {
  const auto tl = corpus_from({{1, 1, 2}});
  BinSpec bins;
  bins.popularity_limits = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, kUnbounded};
  const StateSpace space(bins, fixture::published_rewards());
  const auto& item = tl.items()[0];
  CHECK(space.state_at(item, item.post_minute()) == kUnknownState);
  CHECK(space.state_at(item, item.post_minute() + 1) == state_of({1, 1}, bins));
  CHECK(space.state_at(item, item.post_minute() + 2) == state_of({2, 3}, bins));
  CHECK(space.state_at(item, item.post_minute() + 3) == state_of({3, 4}, bins));
}
