#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "feedrank/events.hpp"
#include "feedrank/index_engine.hpp"
#include "feedrank/ranking.hpp"
#include "feedrank/state_space.hpp"

namespace feedrank {

// Relevance signals: the reward of the item's state at t+1, or counts of
// engagement received during [t, t+1).
enum class Signal { kUtility, kRetweets, kRetweetsReplies, kRetweetsRepliesFavorites };

std::string_view to_string(Signal signal);
std::optional<Signal> parse_signal(std::string_view text);

// DCG = sum_p (2^s(p) - 1) / log2(1 + p) with p 1-based.
double dcg(std::span<const double> relevance_in_rank_order);

// DCG normalised by the DCG of the descending-relevance order; 1 when that
// ideal DCG is zero. Throws DataError on negative relevance.
double ndcg(std::span<const double> relevance_in_rank_order);

// Relevance of an active item at decision minute t. Attention counts are
// capped at `cap`.
double relevance(const ItemTimeline& item, std::int64_t t, Signal signal,
                 const StateSpace& space, double cap);

struct EvaluationConfig {
  MinuteWindow window;                     // decision minutes
  std::optional<MinuteWindow> train_window;  // only used for the overlap warning
  std::int64_t horizon = 60;
  std::int64_t step = 1;  // minutes between decision instants
  std::vector<Policy> policies{Policy::kIndex, Policy::kNovelty, Policy::kPopularity};
  std::vector<Signal> signals{Signal::kUtility, Signal::kRetweets, Signal::kRetweetsReplies,
                              Signal::kRetweetsRepliesFavorites};
  double relevance_cap = 30.0;
  std::optional<HourSet> hours;  // restrict aggregated minutes to these UTC hours
};

struct SeriesPoint {
  std::int64_t minute = 0;
  Policy policy = Policy::kIndex;
  Signal signal = Signal::kUtility;
  double ndcg = 0.0;
  std::size_t active_count = 0;

  bool operator==(const SeriesPoint&) const = default;
};

struct SummaryCell {
  Policy policy = Policy::kIndex;
  Signal signal = Signal::kUtility;
  std::size_t minutes = 0;
  double mean = 0.0;
  double stddev = 0.0;       // population standard deviation
  double correlation = 0.0;  // Pearson(nDCG, active count); NaN if undefined

  bool operator==(const SummaryCell&) const = default;
};

struct EvaluationReport {
  std::vector<std::pair<std::string, std::string>> header;  // fingerprint entries
  std::vector<std::string> warnings;
  double relevance_cap = 30.0;
  std::size_t evaluated_minutes = 0;
  std::size_t empty_minutes = 0;     // skipped: no active items
  std::size_t filtered_minutes = 0;  // skipped: outside the hour set
  std::vector<SeriesPoint> series;   // minute-major, then policy, then signal
  std::vector<SummaryCell> summary;

  const SummaryCell* cell(Policy policy, Signal signal) const;
};

struct SeriesStats {
  double mean = 0.0;
  double stddev = 0.0;
  double correlation = 0.0;
};
SeriesStats summarize(std::span<const double> values, std::span<const double> active_counts);

// Per-minute evaluation runs in parallel; results are assembled in minute
// order, so output equals serial::evaluate_run exactly.
EvaluationReport evaluate_run(const Timelines& timelines, const StateSpace& space,
                              const IndexTable* table, const EvaluationConfig& config);

namespace serial {
EvaluationReport evaluate_run(const Timelines& timelines, const StateSpace& space,
                              const IndexTable* table, const EvaluationConfig& config);
}  // namespace serial

// minute,policy,signal,ndcg,active_count
void write_series_csv(std::ostream& out, const EvaluationReport& report);
// policy,signal,minutes,mean,std,pearson_active
void write_summary_csv(std::ostream& out, const EvaluationReport& report);
void write_report_header(std::ostream& out, const EvaluationReport& report);


}  // namespace feedrank
