#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "feedrank/error.hpp"
#include "feedrank/evaluation.hpp"
#include "feedrank/synth.hpp"
#include "published_fixtures.hpp"
#include "random_models.hpp"

using namespace feedrank;

namespace {

std::string csv_of(const EvaluationReport& r) {
  std::ostringstream out;
  write_series_csv(out, r);
  write_summary_csv(out, r);
  write_report_header(out, r);
  return out.str();
}

struct Corpus {
  Timelines timelines;
  StateSpace space;
  IndexTable table;
};

Corpus small_corpus(int days = 2) {
  GeneratorConfig cfg;
  cfg.days = days;
  cfg.posts_per_day = 300;
  auto events = generate_stream(cfg);
  auto tl = build_timelines(events);
  StateSpace space(fixture::published_bins(), fixture::published_rewards());
  std::mt19937_64 rng(21);
  const auto model = make_model(fixture::random_stochastic(space.size(), rng), 0.1, 0.9);
  auto table = compute_indices(model, space.rewards());
  return {std::move(tl), std::move(space), std::move(table)};
}

}  // namespace

TEST_CASE("ndcg examples") {
  const std::vector<double> ideal{3, 2, 2, 1, 0};
  CHECK(ndcg(ideal) == 1.0);
  const std::vector<double> equal(6, 0.4);
  CHECK(ndcg(equal) == doctest::Approx(1.0).epsilon(1e-15));
  const std::vector<double> swapped{0, 1};
  CHECK(std::abs(ndcg(swapped) - 1.0 / std::log2(3.0)) <= 1e-12);
  const std::vector<double> zeros{0, 0, 0};
  CHECK(ndcg(zeros) == 1.0);
  CHECK(ndcg(std::vector<double>{}) == 1.0);
  const std::vector<double> negative{1, -0.5};
  CHECK_THROWS_AS(ndcg(negative), DataError);
  CHECK(dcg(std::vector<double>{1, 1}) == doctest::Approx(1.0 + 1.0 / std::log2(3.0)));
}

TEST_CASE("ndcg is invariant under permuting equal relevances") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> size(1, 30), level(0, 4);
  for (int round = 0; round < 1000; ++round) {
    std::vector<double> rel(static_cast<std::size_t>(size(rng)));
    for (auto& r : rel) r = 0.5 * level(rng);
    std::shuffle(rel.begin(), rel.end(), rng);
    const double base = ndcg(rel);
    CHECK(base >= 0.0);
    CHECK(base <= 1.0);
    // swap two positions holding the same value
    auto other = rel;
    for (std::size_t i = 0; i < other.size(); ++i)
      for (std::size_t j = i + 1; j < other.size(); ++j)
        if (other[i] == other[j]) {
          std::swap(other[i], other[j]);
          i = other.size();
          break;
        }
    CHECK(ndcg(other) == base);
  }
}

TEST_CASE("signal names round trip") {
  for (auto s : {Signal::kUtility, Signal::kRetweets, Signal::kRetweetsReplies, Signal::kRetweetsRepliesFavorites})
    CHECK(parse_signal(to_string(s)) == s);
  CHECK_FALSE(parse_signal("likes").has_value());
}

TEST_CASE("relevance signals") {
  std::vector<Event> events{{EventKind::kPost, "a", "a", 0, ""}};
  for (int k = 0; k < 40; ++k) events.push_back({EventKind::kRetweet, "a", "r" + std::to_string(k), 120, ""});
  events.push_back({EventKind::kReply, "a", "q", 130, ""});
  events.push_back({EventKind::kFavorite, "a", "f", 150, ""});
  const auto tl = build_timelines(events);
  const auto& item = tl.items()[0];
  StateSpace space(fixture::published_bins(), fixture::published_rewards());
  CHECK(relevance(item, 2, Signal::kRetweets, space, 30) == 30.0);
  CHECK(relevance(item, 2, Signal::kRetweets, space, 100) == 40.0);
  CHECK(relevance(item, 2, Signal::kRetweetsReplies, space, 100) == 41.0);
  CHECK(relevance(item, 2, Signal::kRetweetsRepliesFavorites, space, 100) == 42.0);
  CHECK(relevance(item, 1, Signal::kRetweets, space, 100) == 0.0);
  // utility looks at the state one minute ahead: age 3 with 40 retweets
  CHECK(relevance(item, 2, Signal::kUtility, space, 30) == space.reward(classify(3, 40, space.bins())));
}

TEST_CASE("summary statistics") {
  const std::vector<double> v{1, 2, 3, 4};
  const std::vector<double> c{10, 20, 30, 40};
  auto s = summarize(v, c);
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.stddev == doctest::Approx(std::sqrt(1.25)));
  CHECK(s.correlation == doctest::Approx(1.0));
  const std::vector<double> flat{5, 5, 5, 5};
  CHECK(std::isnan(summarize(v, flat).correlation));
}

TEST_CASE("parallel evaluation equals the serial reference") {
  const auto corpus = small_corpus();
  EvaluationConfig cfg;
  cfg.window = {corpus.timelines.first_minute(), corpus.timelines.last_minute() + 1};
  const auto par = evaluate_run(corpus.timelines, corpus.space, &corpus.table, cfg);
  const auto ser = serial::evaluate_run(corpus.timelines, corpus.space, &corpus.table, cfg);
  CHECK(par.series == ser.series);
  CHECK(csv_of(par) == csv_of(ser));
  CHECK(par.evaluated_minutes > 0);
  for (const auto& p : par.series) {
    CHECK(p.ndcg >= 0.0);
    CHECK(p.ndcg <= 1.0);
  }
  // the summary can be recomputed from the series
  for (const auto& cell : par.summary) {
    std::vector<double> v, c;
    for (const auto& p : par.series)
      if (p.policy == cell.policy && p.signal == cell.signal) {
        v.push_back(p.ndcg);
        c.push_back(static_cast<double>(p.active_count));
      }
    const auto s = summarize(v, c);
    CHECK(cell.minutes == v.size());
    CHECK(cell.mean == s.mean);
    CHECK(cell.stddev == s.stddev);
  }
}

TEST_CASE("hour filter only selects minutes") {
  const auto corpus = small_corpus();
  EvaluationConfig all;
  all.window = {corpus.timelines.first_minute(), corpus.timelines.last_minute() + 1};
  EvaluationConfig peak = all;
  peak.hours = parse_hour_set("12-1");
  const auto a = evaluate_run(corpus.timelines, corpus.space, &corpus.table, all);
  const auto b = evaluate_run(corpus.timelines, corpus.space, &corpus.table, peak);
  CHECK(b.filtered_minutes > 0);
  CHECK(b.evaluated_minutes < a.evaluated_minutes);
  std::size_t matched = 0;
  std::size_t k = 0;
  for (const auto& p : b.series) {
    CHECK(peak.hours->test(static_cast<std::size_t>(utc_hour_of_minute(p.minute))));
    while (k < a.series.size() &&
           !(a.series[k].minute == p.minute && a.series[k].policy == p.policy && a.series[k].signal == p.signal))
      ++k;
    REQUIRE(k < a.series.size());
    CHECK(a.series[k] == p);
    ++matched;
  }
  CHECK(matched == b.series.size());
}

TEST_CASE("one item at a time scores 1 everywhere") {
  std::vector<Event> events;
  for (int i = 0; i < 5; ++i) {
    const std::string id = "s" + std::to_string(i);
    events.push_back({EventKind::kPost, id, id, i * 120 * 60, ""});
    for (int k = 0; k < i; ++k)
      events.push_back({EventKind::kRetweet, id, id + "r" + std::to_string(k), (i * 120 + 3) * 60, ""});
  }
  const auto tl = build_timelines(events);
  StateSpace space(fixture::published_bins(), fixture::published_rewards());
  std::mt19937_64 rng(3);
  const auto table = compute_indices(make_model(fixture::random_stochastic(space.size(), rng), 0.1, 0.9),
                                     space.rewards());
  EvaluationConfig cfg;
  cfg.window = {0, 600};
  const auto r = evaluate_run(tl, space, &table, cfg);
  CHECK(r.evaluated_minutes == 5 * 60);
  CHECK(r.empty_minutes == 600 - 5 * 60);
  for (const auto& p : r.series) CHECK(p.ndcg == 1.0);
}

TEST_CASE("overlapping windows produce a warning, not an error") {
  const auto corpus = small_corpus(1);
  EvaluationConfig cfg;
  cfg.window = {corpus.timelines.first_minute(), corpus.timelines.first_minute() + 300};
  cfg.train_window = MinuteWindow{cfg.window.begin + 100, cfg.window.end + 100};
  const auto r = evaluate_run(corpus.timelines, corpus.space, &corpus.table, cfg);
  REQUIRE(r.warnings.size() == 1);
  std::ostringstream header;
  write_report_header(header, r);
  CHECK(header.str().find("warning = evaluation window overlaps the training window") != std::string::npos);
  cfg.train_window = MinuteWindow{cfg.window.end, cfg.window.end + 10};
  CHECK(evaluate_run(corpus.timelines, corpus.space, &corpus.table, cfg).warnings.empty());
}

TEST_CASE("evaluation config errors") {
  const auto corpus = small_corpus(1);
  EvaluationConfig cfg;
  cfg.window = {0, 0};
  CHECK_THROWS_AS(evaluate_run(corpus.timelines, corpus.space, &corpus.table, cfg), ConfigError);
  cfg.window = {0, 10};
  CHECK_THROWS_AS(evaluate_run(corpus.timelines, corpus.space, nullptr, cfg), ConfigError);
  cfg.policies = {Policy::kNovelty};
  CHECK_NOTHROW(evaluate_run(corpus.timelines, corpus.space, nullptr, cfg));
}
