// feedrank: simulate | fit | indices | evaluate | report
//
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numerical
// failure.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "feedrank/error.hpp"
#include "feedrank/pipeline.hpp"

namespace {

using namespace feedrank;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');)
    if (!tok.empty()) out.push_back(tok);
  return out;
}

// Flags left unset keep the value from --config (or the built-in default).
struct Overrides {
  std::string config_path;
  std::optional<std::string> events, model, report_dir, train_window, eval_window;
  std::optional<double> beta, epsilon, smoothing, relevance_cap;
  std::optional<std::int64_t> horizon, interval;
  std::optional<std::string> novelty_limits, peak_hours, policies, signals;
  std::optional<int> popularity_bins;
  bool all_hours = false;
  bool snapshots = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> days;
  std::optional<double> posts_per_day, alpha;

  void add_to(CLI::App& app) {
    app.add_option("--config", config_path, "JSON run config supplying defaults");
    app.add_option("--events", events, "event log (JSONL)");
    app.add_option("--model", model, "model file");
    app.add_option("--report-dir", report_dir, "evaluation report directory");
    app.add_option("--train-window", train_window, "training minutes begin:end");
    app.add_option("--eval-window", eval_window, "evaluation minutes begin:end");
    app.add_option("--beta", beta, "discount factor in (0,1)");
    app.add_option("--epsilon", epsilon, "off-display slowdown in [0,1]");
    app.add_option("--smoothing", smoothing, "add-alpha smoothing of transition counts");
    app.add_option("--horizon", horizon, "active window in minutes");
    app.add_option("--interval", interval, "minutes between decision instants");
    app.add_option("--novelty-limits", novelty_limits, "comma separated novelty limits");
    app.add_option("--popularity-bins", popularity_bins, "number of popularity bins");
    app.add_option("--peak-hours", peak_hours, "UTC hour set, e.g. 12-1");
    app.add_flag("--all-hours", all_hours, "ignore a peak-hour set from the config");
    app.add_option("--policies", policies, "comma separated: index,novelty,popularity");
    app.add_option("--signals", signals, "comma separated: utility,rt,rt_replies,rt_replies_favs");
    app.add_option("--relevance-cap", relevance_cap, "cap on attention counts");
    app.add_flag("--snapshots", snapshots, "also write rankings.csv");
    app.add_option("--seed", seed, "generator seed");
    app.add_option("--days", days, "simulated days");
    app.add_option("--posts-per-day", posts_per_day, "mean posts per weekday");
    app.add_option("--alpha", alpha, "retweet magnitude power-law exponent");
  }

  RunConfig resolve() const {
    RunConfig c = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (events) c.events = *events;
    if (model) c.model = *model;
    if (report_dir) c.report_dir = *report_dir;
    if (train_window) c.train_window = parse_window(*train_window);
    if (eval_window) c.eval_window = parse_window(*eval_window);
    if (beta) c.beta = *beta;
    if (epsilon) c.epsilon = *epsilon;
    if (smoothing) c.smoothing = *smoothing;
    if (relevance_cap) c.relevance_cap = *relevance_cap;
    if (horizon) c.horizon = *horizon;
    if (interval) c.decision_interval = *interval;
    if (popularity_bins) c.popularity_bins = *popularity_bins;
    if (novelty_limits) {
      std::vector<std::int64_t> limits;
      for (const auto& tok : split_list(*novelty_limits)) {
        try {
          limits.push_back(std::stoll(tok));
        } catch (const std::exception&) {
          throw ConfigError("bad novelty limit '" + tok + "'");
        }
      }
      c.novelty_limits = limits;
    }
    if (peak_hours) c.peak_hours = parse_hour_set(*peak_hours);
    if (all_hours) c.peak_hours.reset();
    if (policies) {
      c.policies.clear();
      for (const auto& name : split_list(*policies)) {
        auto p = parse_policy(name);
        if (!p) throw ConfigError("unknown policy '" + name + "'");
        c.policies.push_back(*p);
      }
    }
    if (signals) {
      c.signals.clear();
      for (const auto& name : split_list(*signals)) {
        auto s = parse_signal(name);
        if (!s) throw ConfigError("unknown signal '" + name + "'");
        c.signals.push_back(*s);
      }
    }
    if (snapshots) c.write_snapshots = true;
    if (seed) c.generator.seed = *seed;
    if (days) c.generator.days = *days;
    if (posts_per_day) c.generator.posts_per_day = *posts_per_day;
    if (alpha) c.generator.alpha = *alpha;
    c.validate();
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Restless-bandit feed ranking: fit, index, rank and evaluate"};
  app.require_subcommand(1);
  Overrides flags;
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic event log");
  auto* fit = app.add_subcommand("fit", "fit bins, rewards and transitions on the training window");
  auto* indices = app.add_subcommand("indices", "compute state indices into the model file");
  auto* evaluate = app.add_subcommand("evaluate", "score rankings with nDCG on the evaluation window");
  auto* report = app.add_subcommand("report", "print the summary table of an evaluation");
  for (auto* sub : {simulate, fit, indices, evaluate, report}) flags.add_to(*sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const auto config = flags.resolve();
    if (simulate->parsed()) {
      const auto s = cmd_simulate(config);
      std::cout << "wrote " << config.events.string() << ": " << s.posts << " posts, " << s.retweets
                << " retweets, " << s.replies << " replies, " << s.favorites << " favorites\n";
    } else if (fit->parsed()) {
      const auto m = cmd_fit(config);
      std::cout << "wrote " << config.model.string() << " (" << *m.header_value("train_items")
                << " training posts, " << m.model.size() << " states)\n";
    } else if (indices->parsed()) {
      const auto m = cmd_indices(config);
      write_rank_grid(std::cout, *m.indices, m.bins);
    } else if (evaluate->parsed()) {
      const auto r = cmd_evaluate(config);
      std::cout << "evaluated " << r.evaluated_minutes << " minutes (" << r.empty_minutes
                << " empty, " << r.filtered_minutes << " filtered) into "
                << config.report_dir.string() << '\n';
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    } else if (report->parsed()) {
      cmd_report(config, std::cout);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
