#include "feedrank/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "feedrank/error.hpp"
#include "feedrank/format.hpp"

namespace feedrank {

namespace {

constexpr std::string_view kSignalNames[] = {"utility", "rt", "rt_replies", "rt_replies_favs"};

struct MinuteResult {
  bool filtered = false;
  std::size_t active = 0;
  std::vector<double> ndcg;  // policy-major
};

MinuteResult evaluate_minute(std::int64_t t, const Timelines& timelines,
                             const StateSpace& space, const IndexTable* table,
                             const EvaluationConfig& config) {
  MinuteResult result;
  if (config.hours && !config.hours->test(static_cast<std::size_t>(utc_hour_of_minute(t)))) {
    result.filtered = true;
    return result;
  }
  const auto active = timelines.active_indices(t, config.horizon);
  result.active = active.size();
  if (active.empty()) return result;

  const auto items = timelines.items();
  std::vector<StateId> states;
  states.reserve(active.size());
  for (auto idx : active) states.push_back(space.state_at(items[idx], t));

  std::vector<std::vector<double>> rel(config.signals.size(), std::vector<double>(active.size()));
  for (std::size_t s = 0; s < config.signals.size(); ++s)
    for (std::size_t k = 0; k < active.size(); ++k)
      rel[s][k] = relevance(items[active[k]], t, config.signals[s], space, config.relevance_cap);

  std::vector<double> ordered(active.size());
  for (auto policy : config.policies) {
    const auto order = order_items(timelines, active, states, t, policy, table);
    for (std::size_t s = 0; s < config.signals.size(); ++s) {
      for (std::size_t r = 0; r < order.size(); ++r) ordered[r] = rel[s][order[r]];
      result.ndcg.push_back(ndcg(ordered));
    }
  }
  return result;
}

void validate(const EvaluationConfig& config, const IndexTable* table, const StateSpace& space) {
  if (config.window.empty()) throw ConfigError("evaluation window is empty");
  if (config.horizon < 1) throw ConfigError("horizon must be at least 1");
  if (config.step < 1) throw ConfigError("decision interval must be at least 1");
  if (config.relevance_cap <= 0.0) throw ConfigError("relevance cap must be positive");
  if (config.policies.empty() || config.signals.empty())
    throw ConfigError("need at least one policy and one signal");
  const bool wants_index =
      std::find(config.policies.begin(), config.policies.end(), Policy::kIndex) != config.policies.end();
  if (wants_index && table == nullptr) throw ConfigError("index policy needs an index table");
  if (table && table->size() != space.size())
    throw ConfigError("index table size does not match the state space");
}

std::int64_t decision_count(const EvaluationConfig& config) {
  return (config.window.end - config.window.begin + config.step - 1) / config.step;
}

EvaluationReport assemble(std::int64_t first, std::vector<MinuteResult> minutes,
                          const EvaluationConfig& config) {
  EvaluationReport report;
  report.relevance_cap = config.relevance_cap;
  if (config.train_window && config.train_window->overlaps(config.window))
    report.warnings.push_back("evaluation window overlaps the training window");

  const auto n_policies = config.policies.size();
  const auto n_signals = config.signals.size();
  std::vector<std::vector<double>> values(n_policies * n_signals);
  std::vector<double> counts;

  for (std::size_t k = 0; k < minutes.size(); ++k) {
    const auto& m = minutes[k];
    if (m.filtered) {
      ++report.filtered_minutes;
      continue;
    }
    if (m.active == 0) {
      ++report.empty_minutes;
      continue;
    }
    ++report.evaluated_minutes;
    counts.push_back(static_cast<double>(m.active));
    const auto t = first + static_cast<std::int64_t>(k) * config.step;
    for (std::size_t p = 0; p < n_policies; ++p)
      for (std::size_t s = 0; s < n_signals; ++s) {
        const double v = m.ndcg[p * n_signals + s];
        values[p * n_signals + s].push_back(v);
        report.series.push_back({t, config.policies[p], config.signals[s], v, m.active});
      }
  }

  for (std::size_t p = 0; p < n_policies; ++p)
    for (std::size_t s = 0; s < n_signals; ++s) {
      const auto& v = values[p * n_signals + s];
      const auto stats = summarize(v, counts);
      report.summary.push_back({config.policies[p], config.signals[s], v.size(), stats.mean,
                                stats.stddev, stats.correlation});
    }
  return report;
}

}  // namespace

std::string_view to_string(Signal signal) { return kSignalNames[static_cast<int>(signal)]; }

std::optional<Signal> parse_signal(std::string_view text) {
  for (int i = 0; i < 4; ++i)
    if (kSignalNames[i] == text) return static_cast<Signal>(i);
  return std::nullopt;
}

double dcg(std::span<const double> relevance_in_rank_order) {
  double total = 0.0;
  for (std::size_t p = 0; p < relevance_in_rank_order.size(); ++p)
    total += (std::exp2(relevance_in_rank_order[p]) - 1.0) / std::log2(static_cast<double>(p) + 2.0);
  return total;
}

double ndcg(std::span<const double> relevance_in_rank_order) {
  for (double s : relevance_in_rank_order)
    if (!(s >= 0.0)) throw DataError("relevance must be non-negative");
  std::vector<double> ideal(relevance_in_rank_order.begin(), relevance_in_rank_order.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const double z = dcg(ideal);
  if (z == 0.0) return 1.0;
  return std::clamp(dcg(relevance_in_rank_order) / z, 0.0, 1.0);
}

double relevance(const ItemTimeline& item, std::int64_t t, Signal signal,
                 const StateSpace& space, double cap) {
  if (signal == Signal::kUtility) return space.reward(space.state_at(item, t + 1));
  const auto c = item.counts_at(t);
  std::int64_t total = c.retweets;
  if (signal != Signal::kRetweets) total += c.replies;
  if (signal == Signal::kRetweetsRepliesFavorites) total += c.favorites;
  return std::min(static_cast<double>(total), cap);
}

const SummaryCell* EvaluationReport::cell(Policy policy, Signal signal) const {
  for (const auto& c : summary)
    if (c.policy == policy && c.signal == signal) return &c;
  return nullptr;
}

SeriesStats summarize(std::span<const double> values, std::span<const double> active_counts) {
  SeriesStats stats;
  const auto n = values.size();
  if (n == 0) {
    stats.mean = stats.stddev = stats.correlation = std::numeric_limits<double>::quiet_NaN();
    return stats;
  }
  double mean_v = 0.0, mean_c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_v += values[i];
    mean_c += active_counts[i];
  }
  mean_v /= static_cast<double>(n);
  mean_c /= static_cast<double>(n);
  double svv = 0.0, scc = 0.0, svc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dv = values[i] - mean_v;
    const double dc = active_counts[i] - mean_c;
    svv += dv * dv;
    scc += dc * dc;
    svc += dv * dc;
  }
  stats.mean = mean_v;
  stats.stddev = std::sqrt(svv / static_cast<double>(n));
  stats.correlation = (svv > 0.0 && scc > 0.0) ? svc / std::sqrt(svv * scc)
                                               : std::numeric_limits<double>::quiet_NaN();
  return stats;
}

EvaluationReport evaluate_run(const Timelines& timelines, const StateSpace& space,
                              const IndexTable* table, const EvaluationConfig& config) {
  validate(config, table, space);
  const auto first = config.window.begin;
  const auto count = decision_count(config);
  std::vector<MinuteResult> minutes(static_cast<std::size_t>(count));
  std::string error;

#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t k = 0; k < count; ++k) {
    try {
      minutes[static_cast<std::size_t>(k)] = evaluate_minute(first + k * config.step, timelines, space, table, config);
    } catch (const std::exception& e) {
#pragma omp critical
      if (error.empty()) error = e.what();
    }
  }
  if (!error.empty()) throw DataError(error);
  return assemble(first, std::move(minutes), config);
}

namespace serial {

EvaluationReport evaluate_run(const Timelines& timelines, const StateSpace& space,
                              const IndexTable* table, const EvaluationConfig& config) {
  validate(config, table, space);
  std::vector<MinuteResult> minutes;
  minutes.reserve(static_cast<std::size_t>(decision_count(config)));
  for (auto t = config.window.begin; t < config.window.end; t += config.step)
    minutes.push_back(evaluate_minute(t, timelines, space, table, config));
  return assemble(config.window.begin, std::move(minutes), config);
}

}  // namespace serial

void write_series_csv(std::ostream& out, const EvaluationReport& report) {
  out << "minute,policy,signal,ndcg,active_count\n";
  for (const auto& p : report.series)
    out << p.minute << ',' << to_string(p.policy) << ',' << to_string(p.signal) << ','
        << format_double(p.ndcg) << ',' << p.active_count << '\n';
}

void write_summary_csv(std::ostream& out, const EvaluationReport& report) {
  out << "policy,signal,minutes,mean,std,pearson_active\n";
  for (const auto& c : report.summary)
    out << to_string(c.policy) << ',' << to_string(c.signal) << ',' << c.minutes << ','
        << format_double(c.mean) << ',' << format_double(c.stddev) << ','
        << format_double(c.correlation) << '\n';
}

void write_report_header(std::ostream& out, const EvaluationReport& report) {
  for (const auto& [key, value] : report.header) out << key << " = " << value << '\n';
  out << "relevance_cap = " << format_double(report.relevance_cap) << '\n';
  out << "evaluated_minutes = " << report.evaluated_minutes << '\n';
  out << "empty_minutes = " << report.empty_minutes << '\n';
  out << "filtered_minutes = " << report.filtered_minutes << '\n';
  for (const auto& w : report.warnings) out << "warning = " << w << '\n';
}

}  // namespace feedrank
