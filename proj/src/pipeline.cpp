#include "feedrank/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "feedrank/error.hpp"
#include "feedrank/format.hpp"
#include "json.hpp"

namespace feedrank {

namespace {

using nlohmann::json;

std::string join_limits(const std::vector<std::int64_t>& limits) {
  std::string out;
  for (auto v : limits) {
    if (!out.empty()) out += ' ';
    out += v == kUnbounded ? "inf" : std::to_string(v);
  }
  return out;
}

template <typename T>
T get_as(const json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

MinuteWindow window_from_json(const json& value, const std::string& key) {
  if (value.is_string()) return parse_window(value.get<std::string>());
  if (value.is_array() && value.size() == 2)
    return {get_as<std::int64_t>(value[0], key), get_as<std::int64_t>(value[1], key)};
  throw ConfigError("config key '" + key + "' must be \"begin:end\" or [begin, end]");
}

void apply_generator(GeneratorConfig& g, const json& doc) {
  if (!doc.is_object()) throw ConfigError("config key 'generator' must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "seed") g.seed = get_as<std::uint64_t>(value, key);
    else if (key == "start_ts") g.start_ts = get_as<std::int64_t>(value, key);
    else if (key == "days") g.days = get_as<int>(value, key);
    else if (key == "n_accounts") g.n_accounts = get_as<int>(value, key);
    else if (key == "posts_per_day") g.posts_per_day = get_as<double>(value, key);
    else if (key == "weekend_factor") g.weekend_factor = get_as<double>(value, key);
    else if (key == "hour_weights") g.hour_weights = get_as<std::array<double, 24>>(value, key);
    else if (key == "zero_fraction") g.zero_fraction = get_as<double>(value, key);
    else if (key == "alpha") g.alpha = get_as<double>(value, key);
    else if (key == "x_min") g.x_min = get_as<std::int64_t>(value, key);
    else if (key == "max_magnitude") g.max_magnitude = get_as<std::int64_t>(value, key);
    else if (key == "head_weights") g.head_weights = get_as<std::array<double, 3>>(value, key);
    else if (key == "gamma") g.gamma = get_as<double>(value, key);
    else if (key == "jitter_sigma") g.jitter_sigma = get_as<double>(value, key);
    else if (key == "reply_rate") g.reply_rate = get_as<double>(value, key);
    else if (key == "favorite_rate") g.favorite_rate = get_as<double>(value, key);
    else throw ConfigError("unknown generator key '" + key + "'");
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

std::vector<std::pair<std::string, std::string>> run_fingerprint(const ModelFile& model,
                                                                 const RunConfig& config,
                                                                 const Windows& windows) {
  std::vector<std::pair<std::string, std::string>> header;
  header.emplace_back("beta", format_double(model.model.beta));
  if (const auto* eps = model.header_value("epsilon")) header.emplace_back("epsilon", *eps);
  header.emplace_back("novelty_limits", join_limits(model.bins.novelty_limits));
  header.emplace_back("popularity_limits", join_limits(model.bins.popularity_limits));
  if (const auto* w = model.header_value("train_window")) header.emplace_back("train_window", *w);
  header.emplace_back("eval_window", format_window(windows.eval));
  header.emplace_back("horizon", std::to_string(config.horizon));
  header.emplace_back("decision_interval", std::to_string(config.decision_interval));
  header.emplace_back("peak_hours",
                      config.peak_hours ? format_hour_set(*config.peak_hours) : std::string("all"));
  std::string policies, signals;
  for (auto p : config.policies) policies += (policies.empty() ? "" : ",") + std::string(to_string(p));
  for (auto s : config.signals) signals += (signals.empty() ? "" : ",") + std::string(to_string(s));
  header.emplace_back("policies", policies);
  header.emplace_back("signals", signals);
  return header;
}

}  // namespace

void RunConfig::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0, 1)");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
  if (!(smoothing >= 0.0)) throw ConfigError("smoothing must be non-negative");
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  if (decision_interval < 1) throw ConfigError("decision interval must be at least 1");
  if (popularity_bins < 2) throw ConfigError("need at least two popularity bins");
  if (!(relevance_cap > 0.0)) throw ConfigError("relevance cap must be positive");
  if (train_window && train_window->empty()) throw ConfigError("train window is empty");
  if (eval_window && eval_window->empty()) throw ConfigError("eval window is empty");
  if (novelty_limits) {
    BinSpec probe;
    probe.novelty_limits = *novelty_limits;
    probe.popularity_limits = {0, kUnbounded};
    probe.validate();
  }
}

void apply_config_json(RunConfig& config, const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "events") config.events = get_as<std::string>(value, key);
    else if (key == "model") config.model = get_as<std::string>(value, key);
    else if (key == "report_dir") config.report_dir = get_as<std::string>(value, key);
    else if (key == "train_window") config.train_window = window_from_json(value, key);
    else if (key == "eval_window") config.eval_window = window_from_json(value, key);
    else if (key == "beta") config.beta = get_as<double>(value, key);
    else if (key == "epsilon") config.epsilon = get_as<double>(value, key);
    else if (key == "smoothing") config.smoothing = get_as<double>(value, key);
    else if (key == "horizon") config.horizon = get_as<std::int64_t>(value, key);
    else if (key == "decision_interval") config.decision_interval = get_as<std::int64_t>(value, key);
    else if (key == "novelty_limits")
      config.novelty_limits = get_as<std::vector<std::int64_t>>(value, key);
    else if (key == "popularity_bins") config.popularity_bins = get_as<int>(value, key);
    else if (key == "peak_hours") {
      if (value.is_null()) config.peak_hours.reset();
      else config.peak_hours = parse_hour_set(get_as<std::string>(value, key));
    } else if (key == "policies") {
      config.policies.clear();
      for (const auto& name : get_as<std::vector<std::string>>(value, key)) {
        auto p = parse_policy(name);
        if (!p) throw ConfigError("unknown policy '" + name + "'");
        config.policies.push_back(*p);
      }
    } else if (key == "signals") {
      config.signals.clear();
      for (const auto& name : get_as<std::vector<std::string>>(value, key)) {
        auto s = parse_signal(name);
        if (!s) throw ConfigError("unknown signal '" + name + "'");
        config.signals.push_back(*s);
      }
    } else if (key == "relevance_cap") config.relevance_cap = get_as<double>(value, key);
    else if (key == "write_snapshots") config.write_snapshots = get_as<bool>(value, key);
    else if (key == "generator") apply_generator(config.generator, value);
    else throw ConfigError("unknown config key '" + key + "'");
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  RunConfig config;
  apply_config_json(config, buf.str());
  return config;
}

MinuteWindow parse_window(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ConfigError("window must look like begin:end");
  auto number = [&](std::string_view part) {
    std::int64_t v = 0;
    auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || end != part.data() + part.size())
      throw ConfigError("bad window bound '" + std::string(part) + "'");
    return v;
  };
  MinuteWindow w{number(text.substr(0, colon)), number(text.substr(colon + 1))};
  if (w.empty()) throw ConfigError("window " + std::string(text) + " is empty");
  return w;
}

std::string format_window(const MinuteWindow& window) {
  return std::to_string(window.begin) + ":" + std::to_string(window.end);
}

Windows resolve_windows(const Timelines& timelines, const RunConfig& config) {
  if (timelines.empty()) throw DataError("event log contains no posts");
  const auto first = timelines.first_minute();
  const auto end = timelines.last_minute() + 1;
  const auto mid = first + (end - first) / 2;
  Windows w;
  w.train = config.train_window.value_or(MinuteWindow{first, mid});
  w.eval = config.eval_window.value_or(MinuteWindow{mid, end});
  if (w.train.empty()) throw DataError("training window is empty");
  if (w.eval.empty()) throw DataError("evaluation window is empty");
  return w;
}

ModelFile fit_model(const Timelines& timelines, const RunConfig& config) {
  config.validate();
  const auto windows = resolve_windows(timelines, config);
  const HourSet* hours = config.peak_hours ? &*config.peak_hours : nullptr;
  const auto items = items_posted_in(timelines, windows.train, hours);
  if (items.empty()) throw DataError("no posts in the training window " + format_window(windows.train));

  std::vector<std::int64_t> totals;
  totals.reserve(items.size());
  std::int64_t retweets = 0;
  for (auto i : items) {
    totals.push_back(timelines.items()[i].total_retweets());
    retweets += totals.back();
  }

  ModelFile file;
  if (config.novelty_limits) file.bins.novelty_limits = *config.novelty_limits;
  file.bins.popularity_limits = fit_popularity_bins(totals, config.popularity_bins);
  file.factors = fit_rewards(timelines, items, file.bins);
  const auto p1 = estimate_p1(timelines, items, file.bins, config.smoothing);
  file.model = make_model(p1, config.epsilon, config.beta);

  file.set_header("beta", format_double(config.beta));
  file.set_header("epsilon", format_double(config.epsilon));
  file.set_header("smoothing", format_double(config.smoothing));
  file.set_header("train_window", format_window(windows.train));
  file.set_header("peak_hours", hours ? format_hour_set(*hours) : std::string("all"));
  file.set_header("popularity_bins", std::to_string(config.popularity_bins));
  file.set_header("train_items", std::to_string(items.size()));
  file.set_header("train_retweets", std::to_string(retweets));
  return file;
}

void attach_indices(ModelFile& model) {
  const auto space = state_space_of(model);
  model.indices = compute_indices(model.model, space.rewards());
}

StateSpace state_space_of(const ModelFile& model) { return StateSpace(model.bins, model.factors); }

EvaluationReport evaluate_model(const Timelines& timelines, const ModelFile& model,
                                const RunConfig& config) {
  config.validate();
  const auto windows = resolve_windows(timelines, config);
  const auto space = state_space_of(model);

  EvaluationConfig eval;
  eval.window = windows.eval;
  eval.horizon = config.horizon;
  eval.step = config.decision_interval;
  eval.policies = config.policies;
  eval.signals = config.signals;
  eval.relevance_cap = config.relevance_cap;
  eval.hours = config.peak_hours;
  if (const auto* w = model.header_value("train_window")) eval.train_window = parse_window(*w);

  auto report = evaluate_run(timelines, space, model.indices ? &*model.indices : nullptr, eval);
  report.header = run_fingerprint(model, config, windows);
  return report;
}

std::vector<Event> read_event_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read event log " + path.string());
  return parse_event_log(in);
}

Timelines load_timelines(const std::filesystem::path& path) {
  const auto events = read_event_file(path);
  return build_timelines(events);
}

ModelFile read_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read model file " + path.string());
  return read_model(in);
}

void write_model_file(const std::filesystem::path& path, const ModelFile& model) {
  auto out = open_output(path);
  write_model(out, model);
}

SimulateSummary cmd_simulate(const RunConfig& config) {
  const auto events = generate_stream(config.generator);
  auto out = open_output(config.events);
  write_event_log(out, events);
  SimulateSummary summary;
  for (const auto& e : events) {
    switch (e.kind) {
      case EventKind::kPost: ++summary.posts; break;
      case EventKind::kRetweet: ++summary.retweets; break;
      case EventKind::kReply: ++summary.replies; break;
      case EventKind::kFavorite: ++summary.favorites; break;
    }
  }
  return summary;
}

ModelFile cmd_fit(const RunConfig& config) {
  const auto model = fit_model(load_timelines(config.events), config);
  write_model_file(config.model, model);
  return model;
}

ModelFile cmd_indices(const RunConfig& config) {
  auto model = read_model_file(config.model);
  model.model.beta = config.beta;
  model.set_header("beta", format_double(config.beta));
  attach_indices(model);
  write_model_file(config.model, model);
  return model;
}

EvaluationReport cmd_evaluate(const RunConfig& config) {
  const auto timelines = load_timelines(config.events);
  const auto model = read_model_file(config.model);
  auto report = evaluate_model(timelines, model, config);

  std::filesystem::create_directories(config.report_dir);
  {
    auto out = open_output(config.report_dir / "series.csv");
    write_series_csv(out, report);
  }
  {
    auto out = open_output(config.report_dir / "summary.csv");
    write_summary_csv(out, report);
  }
  {
    auto out = open_output(config.report_dir / "header.txt");
    write_report_header(out, report);
  }
  if (config.write_snapshots) {
    const auto space = state_space_of(model);
    const auto windows = resolve_windows(timelines, config);
    auto out = open_output(config.report_dir / "rankings.csv");
    write_snapshot_csv_header(out);
    const IndexTable* table = model.indices ? &*model.indices : nullptr;
    for (auto t = windows.eval.begin; t < windows.eval.end; t += config.decision_interval) {
      if (config.peak_hours && !config.peak_hours->test(static_cast<std::size_t>(utc_hour_of_minute(t))))
        continue;
      for (auto policy : config.policies)
        write_snapshot_csv(out, rank_items(t, timelines, space, table, policy, config.horizon));
    }
  }
  return report;
}

void cmd_report(const RunConfig& config, std::ostream& out) {
  const auto path = config.report_dir / "summary.csv";
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());

  std::vector<std::string> policies;
  std::vector<std::string> signals;
  std::map<std::pair<std::string, std::string>, std::pair<double, double>> cells;
  std::map<std::pair<std::string, std::string>, double> corr;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string tok; std::getline(ss, tok, ',');) f.push_back(tok);
    if (f.size() != 6) throw DataError("malformed summary line: " + line);
    if (std::find(policies.begin(), policies.end(), f[0]) == policies.end()) policies.push_back(f[0]);
    if (std::find(signals.begin(), signals.end(), f[1]) == signals.end()) signals.push_back(f[1]);
    cells[{f[0], f[1]}] = {parse_double(f[3]), parse_double(f[4])};
    corr[{f[0], f[1]}] = parse_double(f[5]);
  }

  out << "mean nDCG (std) by relevance signal and ranking policy\n";
  out << std::left << std::setw(18) << "signal";
  for (const auto& p : policies) out << std::setw(18) << p;
  out << '\n';
  out << std::fixed << std::setprecision(3);
  for (const auto& s : signals) {
    out << std::setw(18) << s;
    for (const auto& p : policies) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(3) << cells[{p, s}].first << " ("
           << cells[{p, s}].second << ")";
      out << std::setw(18) << cell.str();
    }
    out << '\n';
  }
  out << "\nPearson(nDCG, active items)\n";
  for (const auto& s : signals) {
    out << std::setw(18) << s;
    for (const auto& p : policies) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(3) << corr[{p, s}];
      out << std::setw(18) << cell.str();
    }
    out << '\n';
  }
}

}  // namespace feedrank
