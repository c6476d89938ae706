#include <random>

#include "doctest.h"
#include "feedrank/error.hpp"
#include "feedrank/synth.hpp"
#include "feedrank/transition_model.hpp"
#include "markov_fixtures.hpp"
#include "oracles.hpp"
#include "published_fixtures.hpp"

using namespace feedrank;

TEST_CASE("deterministic walk gives unit rows") {
  const auto bins = fixture::published_bins();
  const StateId s11 = state_of({1, 1}, bins), s21 = state_of({2, 1}, bins);
  const std::vector<Trajectory> paths{{kUnknownState, s11, s21, kUnknownState}};
  const auto p1 = p1_from_counts(count_transitions(paths, bins.state_count()));
  CHECK(p1(s11, s21) == 1.0);
  CHECK(p1(s21, kUnknownState) == 1.0);
  CHECK(p1.row(s11).sum() == 1.0);
  // unobserved rows self-loop
  CHECK(p1(50, 50) == 1.0);
}

TEST_CASE("split transitions give equal frequencies") {
  const auto bins = fixture::published_bins();
  const StateId s11 = state_of({1, 1}, bins);
  const std::vector<Trajectory> paths{{s11, state_of({2, 1}, bins)}, {s11, state_of({2, 2}, bins)}};
  const auto p1 = p1_from_counts(count_transitions(paths, bins.state_count()));
  CHECK(p1(s11, state_of({2, 1}, bins)) == 0.5);
  CHECK(p1(s11, state_of({2, 2}, bins)) == 0.5);
}

TEST_CASE("smoothing keeps observed rows stochastic") {
  Matrix counts = Matrix::Zero(3, 3);
  counts(0, 1) = 3;
  const auto p = p1_from_counts(counts, 1.0);
  CHECK(p(0, 1) == doctest::Approx(4.0 / 6.0));
  CHECK(p(0, 0) == doctest::Approx(1.0 / 6.0));
  CHECK(p(1, 1) == 1.0);
  CHECK_THROWS_AS(p1_from_counts(counts, -1.0), ConfigError);
}

TEST_CASE("derive_p0 examples") {
  SUBCASE("identity is a fixed point") {
    const Matrix id = Matrix::Identity(4, 4);
    CHECK(derive_p0(id, Vector::Constant(4, 0.3)) == id);
  }
  SUBCASE("direct substitution") {
    Matrix p1(2, 2);
    p1 << 0.4, 0.6, 0.0, 1.0;
    const auto p0 = derive_p0(p1, Vector::Constant(2, 0.1));
    CHECK(p0(0, 0) == doctest::Approx(0.94).epsilon(1e-15));
    CHECK(p0(0, 1) == doctest::Approx(0.06).epsilon(1e-15));
  }
  SUBCASE("epsilon one and zero") {
    Matrix p1(2, 2);
    p1 << 0.4, 0.6, 0.3, 0.7;
    CHECK(derive_p0(p1, Vector::Ones(2)) == p1);
    CHECK(derive_p0(p1, Vector::Zero(2)) == Matrix::Identity(2, 2));
  }
  SUBCASE("epsilon outside [0, 1]") {
    CHECK_THROWS_AS(derive_p0(Matrix::Identity(2, 2), Vector::Constant(2, 1.5)), ConfigError);
    CHECK_THROWS_AS(derive_p0(Matrix::Identity(2, 2), Vector::Constant(2, -0.1)), ConfigError);
  }
}

TEST_CASE("make_model validates") {
  Matrix p1(2, 2);
  p1 << 0.5, 0.5, 0.2, 0.8;
  CHECK_NOTHROW(make_model(p1, 0.1, 0.9));
  CHECK_THROWS_AS(make_model(p1, 0.1, 1.0), ConfigError);
  p1(0, 0) = 0.6;
  CHECK_THROWS_AS(make_model(p1, 0.1, 0.9), NumericalError);
}

namespace {

struct SmallCorpus {
  std::vector<Event> events;
  Timelines timelines;
  BinSpec bins;
  std::vector<std::size_t> items;
};

SmallCorpus small_corpus() {
  GeneratorConfig g;
  g.seed = 42;
  g.days = 4;
  g.posts_per_day = 250;
  SmallCorpus c;
  c.events = generate_stream(g);
  c.timelines = build_timelines(c.events);
  std::vector<std::int64_t> totals;
  for (const auto& item : c.timelines.items()) totals.push_back(item.total_retweets());
  c.bins.popularity_limits = fit_popularity_bins(totals);
  for (std::size_t i = 0; i < c.timelines.size(); ++i) c.items.push_back(i);
  return c;
}

}  // namespace

TEST_CASE("estimate_p1 equals an independent recount from raw events") {
  const auto c = small_corpus();
  REQUIRE(c.items.size() >= 800);
  const auto p1 = estimate_p1(c.timelines, c.items, c.bins);
  const auto oracle_p1 = oracle::transition_frequencies(c.events, c.bins.novelty_limits,
                                                        c.bins.popularity_limits, 0,
                                                        std::numeric_limits<std::int64_t>::max());
  double worst = 0.0;
  for (int i = 0; i < p1.rows(); ++i)
    for (int j = 0; j < p1.cols(); ++j)
      worst = std::max(worst, std::abs(p1(i, j) - oracle_p1[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]));
  CHECK(worst < 1e-12);
  CHECK(serial::estimate_p1(c.timelines, c.items, c.bins) == p1);
}

TEST_CASE("transition count equals item-minutes with a successor") {
  const auto c = small_corpus();
  std::vector<Trajectory> paths;
  for (auto i : c.items) paths.push_back(item_trajectory(c.timelines.items()[i], c.bins));
  const auto counts = count_transitions(paths, c.bins.state_count());
  CHECK(counts.sum() == doctest::Approx(60.0 * static_cast<double>(c.items.size())));
  CHECK(counts.row(kUnknownState).sum() == doctest::Approx(static_cast<double>(c.items.size())));
}

TEST_CASE("estimate_p1 rejects an empty window") {
  const auto c = small_corpus();
  CHECK_THROWS_AS(estimate_p1(c.timelines, {}, c.bins), DataError);
}

TEST_CASE("estimated chain converges to the generator chain") {
  const auto bins = fixture::unit_minute_bins(3);
  const auto truth = fixture::generator_chain(bins, 0.85);
  MarkovStreamConfig cfg;
  cfg.seed = 9;
  cfg.n_items = 20000;
  const auto events = generate_markov_stream(bins, truth, cfg);
  const auto tl = build_timelines(events);
  std::vector<std::size_t> items(tl.size());
  for (std::size_t i = 0; i < items.size(); ++i) items[i] = i;
  const auto p1 = estimate_p1(tl, items, bins);
  CHECK((p1 - truth).cwiseAbs().maxCoeff() < 0.05);
}
