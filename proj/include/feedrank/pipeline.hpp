#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "feedrank/evaluation.hpp"
#include "feedrank/model_io.hpp"
#include "feedrank/synth.hpp"

namespace feedrank {

struct RunConfig {
  std::filesystem::path events = "events.jsonl";
  std::filesystem::path model = "model.txt";
  std::filesystem::path report_dir = "report";

  // Unset windows split the log's minute span into halves: fit on the
  // first, evaluate on the second.
  std::optional<MinuteWindow> train_window;
  std::optional<MinuteWindow> eval_window;

  double beta = 0.9;
  double epsilon = 0.1;
  double smoothing = 0.0;
  std::int64_t horizon = 60;
  std::int64_t decision_interval = 1;
  std::optional<std::vector<std::int64_t>> novelty_limits;
  int popularity_bins = 10;
  std::optional<HourSet> peak_hours;
  std::vector<Policy> policies{Policy::kIndex, Policy::kNovelty, Policy::kPopularity};
  std::vector<Signal> signals{Signal::kUtility, Signal::kRetweets, Signal::kRetweetsReplies,
                              Signal::kRetweetsRepliesFavorites};
  double relevance_cap = 30.0;
  bool write_snapshots = false;

  GeneratorConfig generator;

  // Throws ConfigError.
  void validate() const;
};

// Applies the keys present in a JSON config document over `config`.
void apply_config_json(RunConfig& config, const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);

MinuteWindow parse_window(std::string_view text);  // "begin:end"
std::string format_window(const MinuteWindow& window);

struct Windows {
  MinuteWindow train;
  MinuteWindow eval;
};
Windows resolve_windows(const Timelines& timelines, const RunConfig& config);

// In-process stages; the cmd_* functions wrap these with file IO.
ModelFile fit_model(const Timelines& timelines, const RunConfig& config);
void attach_indices(ModelFile& model);
StateSpace state_space_of(const ModelFile& model);
EvaluationReport evaluate_model(const Timelines& timelines, const ModelFile& model,
                                const RunConfig& config);

std::vector<Event> read_event_file(const std::filesystem::path& path);
Timelines load_timelines(const std::filesystem::path& path);
ModelFile read_model_file(const std::filesystem::path& path);
void write_model_file(const std::filesystem::path& path, const ModelFile& model);

struct SimulateSummary {
  std::size_t posts = 0;
  std::size_t retweets = 0;
  std::size_t replies = 0;
  std::size_t favorites = 0;
};

SimulateSummary cmd_simulate(const RunConfig& config);
ModelFile cmd_fit(const RunConfig& config);
ModelFile cmd_indices(const RunConfig& config);
EvaluationReport cmd_evaluate(const RunConfig& config);
// Pretty-prints report_dir/summary.csv as a signal x policy table.
void cmd_report(const RunConfig& config, std::ostream& out);

}  // namespace feedrank
