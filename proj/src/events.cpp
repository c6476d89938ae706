#include "feedrank/events.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "feedrank/error.hpp"
#include "json.hpp"

namespace feedrank {

namespace {

constexpr std::string_view kKindNames[] = {"post", "retweet", "reply",
                                           "favorite"};

[[noreturn]] void fail_line(std::size_t line_no, const std::string& what) {
  throw DataError("event log line " + std::to_string(line_no) + ": " + what);
}

std::string require_string(const nlohmann::json& record, const char* key,
                           std::size_t line_no) {
  auto it = record.find(key);
  if (it == record.end()) fail_line(line_no, std::string("missing field '") + key + "'");
  if (!it->is_string()) fail_line(line_no, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

Event parse_record(std::string_view line, std::size_t line_no) {
  nlohmann::json record;
  try {
    record = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    fail_line(line_no, std::string("malformed record (") + e.what() + ")");
  }
  if (!record.is_object()) fail_line(line_no, "record is not an object");

  Event event;
  const auto kind_text = require_string(record, "kind", line_no);
  const auto kind = parse_event_kind(kind_text);
  if (!kind) fail_line(line_no, "unknown kind '" + kind_text + "'");
  event.kind = *kind;
  event.item_id = require_string(record, "item_id", line_no);
  event.event_id = require_string(record, "event_id", line_no);

  auto ts = record.find("ts");
  if (ts == record.end()) fail_line(line_no, "missing field 'ts'");
  if (!ts->is_number_integer()) fail_line(line_no, "field 'ts' must be an integer");
  event.ts = ts->get<std::int64_t>();
  if (event.ts < 0) fail_line(line_no, "negative timestamp");

  if (auto account = record.find("account"); account != record.end()) {
    if (!account->is_string()) fail_line(line_no, "field 'account' must be a string");
    event.account = account->get<std::string>();
  }
  if (event.kind == EventKind::kPost && event.item_id != event.event_id)
    fail_line(line_no, "post event_id must equal its item_id");
  return event;
}

}  // namespace

std::string_view to_string(EventKind kind) {
  return kKindNames[static_cast<int>(kind)];
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  for (int i = 0; i < 4; ++i)
    if (kKindNames[i] == text) return static_cast<EventKind>(i);
  return std::nullopt;
}

std::vector<Event> parse_event_log(std::istream& in) {
  std::vector<Event> events;
  std::unordered_set<std::string> posted;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    Event event = parse_record(line, line_no);
    if (event.kind == EventKind::kPost && !posted.insert(event.item_id).second)
      fail_line(line_no, "duplicate post for item '" + event.item_id + "'");
    events.push_back(std::move(event));
  }
  return events;
}

std::vector<Event> parse_event_log(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_event_log(in);
}

std::string format_event(const Event& event) {
  nlohmann::ordered_json record;
  record["kind"] = to_string(event.kind);
  record["item_id"] = event.item_id;
  record["event_id"] = event.event_id;
  record["ts"] = event.ts;
  record["account"] = event.account;
  return record.dump();
}

void write_event_log(std::ostream& out, std::span<const Event> events) {
  for (const auto& event : events) out << format_event(event) << '\n';
}

// ---------------------------------------------------------------------------

ItemTimeline::ItemTimeline(std::string item_id, std::int64_t post_ts,
                           std::string account)
    : item_id_(std::move(item_id)), account_(std::move(account)), post_ts_(post_ts) {}

MinuteCounts ItemTimeline::counts_at(std::int64_t minute) const {
  auto it = std::lower_bound(minutes_.begin(), minutes_.end(), minute);
  if (it == minutes_.end() || *it != minute) return {};
  return counts_[static_cast<std::size_t>(it - minutes_.begin())];
}

std::int64_t ItemTimeline::retweets_through(std::int64_t minute) const {
  auto it = std::upper_bound(minutes_.begin(), minutes_.end(), minute);
  if (it == minutes_.begin()) return 0;
  return cumulative_retweets_[static_cast<std::size_t>(it - minutes_.begin()) - 1];
}

class TimelineBuilder {
 public:
  TimelineBuilder(std::string item_id, std::int64_t post_ts, std::string account)
      : timeline_(std::move(item_id), post_ts, std::move(account)) {}

  void add(EventKind kind, std::int64_t minute) {
    auto& counts = per_minute_[minute];
    switch (kind) {
      case EventKind::kRetweet: ++counts.retweets; break;
      case EventKind::kReply: ++counts.replies; break;
      case EventKind::kFavorite: ++counts.favorites; break;
      case EventKind::kPost: break;
    }
  }

  std::int64_t post_minute() const { return timeline_.post_minute(); }
  std::int64_t earliest_minute() const {
    return per_minute_.empty() ? timeline_.post_minute() : per_minute_.begin()->first;
  }

  ItemTimeline finish() && {
    std::int64_t running = 0;
    for (const auto& [minute, counts] : per_minute_) {
      running += counts.retweets;
      timeline_.minutes_.push_back(minute);
      timeline_.counts_.push_back(counts);
      timeline_.cumulative_retweets_.push_back(running);
    }
    return std::move(timeline_);
  }

 private:
  ItemTimeline timeline_;
  std::map<std::int64_t, MinuteCounts> per_minute_;
};

Timelines::Timelines(std::vector<ItemTimeline> items) : items_(std::move(items)) {
  std::sort(items_.begin(), items_.end(), [](const auto& a, const auto& b) {
    if (a.post_ts() != b.post_ts()) return a.post_ts() < b.post_ts();
    return a.item_id() < b.item_id();
  });
  post_minutes_.reserve(items_.size());
  for (std::size_t i = 0; i < items_.size(); ++i) {
    post_minutes_.push_back(items_[i].post_minute());
    by_id_.emplace(items_[i].item_id(), i);
  }
}

const ItemTimeline* Timelines::find(std::string_view item_id) const {
  auto it = by_id_.find(std::string(item_id));
  return it == by_id_.end() ? nullptr : &items_[it->second];
}

std::vector<std::size_t> Timelines::active_indices(std::int64_t t,
                                                   std::int64_t horizon) const {
  // post_minute in [t - horizon, t - 1]
  auto lo = std::lower_bound(post_minutes_.begin(), post_minutes_.end(), t - horizon);
  auto hi = std::lower_bound(post_minutes_.begin(), post_minutes_.end(), t);
  std::vector<std::size_t> out;
  out.reserve(static_cast<std::size_t>(hi - lo));
  for (auto it = lo; it < hi; ++it)
    out.push_back(static_cast<std::size_t>(it - post_minutes_.begin()));
  return out;
}

std::int64_t Timelines::first_minute() const {
  return post_minutes_.empty() ? 0 : post_minutes_.front();
}

std::int64_t Timelines::last_minute() const {
  std::int64_t last = first_minute();
  for (const auto& item : items_) {
    last = std::max(last, item.post_minute());
    if (!item.empty()) last = std::max(last, item.active_minutes().back());
  }
  return last;
}

Timelines build_timelines(std::span<const Event> events) {
  std::map<std::string, TimelineBuilder, std::less<>> builders;
  for (const auto& event : events) {
    if (event.kind != EventKind::kPost) continue;
    if (builders.contains(event.item_id))
      throw DataError("duplicate post for item '" + event.item_id + "'");
    builders.emplace(event.item_id,
                     TimelineBuilder(event.item_id, event.ts, event.account));
  }

  std::vector<std::string> orphans;
  for (const auto& event : events) {
    if (event.kind == EventKind::kPost) continue;
    auto it = builders.find(event.item_id);
    if (it == builders.end()) {
      if (orphans.empty() || orphans.back() != event.item_id) orphans.push_back(event.item_id);
      continue;
    }
    it->second.add(event.kind, minute_of(event.ts));
  }
  if (!orphans.empty()) {
    std::sort(orphans.begin(), orphans.end());
    orphans.erase(std::unique(orphans.begin(), orphans.end()), orphans.end());
    std::string list;
    for (const auto& id : orphans) list += (list.empty() ? "" : ", ") + id;
    throw DataError("engagement refers to items without a post: " + list);
  }

  std::vector<ItemTimeline> items;
  items.reserve(builders.size());
  for (auto& [id, builder] : builders) {
    if (builder.earliest_minute() < builder.post_minute())
      throw DataError("engagement for item '" + id + "' precedes its post minute");
    items.push_back(std::move(builder).finish());
  }
  return Timelines(std::move(items));
}

HourSet parse_hour_set(std::string_view text) {
  HourSet hours;
  auto parse_hour = [&](std::string_view token) {
    int value = -1;
    try {
      std::size_t used = 0;
      value = std::stoi(std::string(token), &used);
      if (used != token.size()) value = -1;
    } catch (const std::exception&) {
      value = -1;
    }
    if (value < 0 || value > 23) throw ConfigError("bad hour '" + std::string(token) + "'");
    return value;
  };
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    auto token = text.substr(start, comma - start);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    if (!token.empty()) {
      if (auto dash = token.find('-'); dash != std::string_view::npos) {
        const int from = parse_hour(token.substr(0, dash));
        const int to = parse_hour(token.substr(dash + 1));
        for (int h = from;; h = (h + 1) % 24) {
          hours.set(static_cast<std::size_t>(h));
          if (h == to) break;
        }
      } else {
        hours.set(static_cast<std::size_t>(parse_hour(token)));
      }
    }
    start = comma + 1;
  }
  if (hours.none()) throw ConfigError("empty hour set");
  return hours;
}

std::string format_hour_set(const HourSet& hours) {
  std::string out;
  for (int h = 0; h < 24; ++h) {
    if (!hours.test(static_cast<std::size_t>(h))) continue;
    if (!out.empty()) out += ',';
    out += std::to_string(h);
  }
  return out;
}

std::vector<std::size_t> items_posted_in(const Timelines& timelines,
                                         const MinuteWindow& window,
                                         const HourSet* hours) {
  std::vector<std::size_t> out;
  const auto items = timelines.items();
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto minute = items[i].post_minute();
    if (!window.contains(minute)) continue;
    if (hours && !hours->test(static_cast<std::size_t>(utc_hour_of_minute(minute)))) continue;
    out.push_back(i);
  }
  return out;
}

std::vector<std::string> active_set(const Timelines& timelines, std::int64_t t,
                                    std::int64_t horizon) {
  std::vector<std::string> ids;
  for (auto i : timelines.active_indices(t, horizon))
    ids.push_back(timelines.items()[i].item_id());
  return ids;
}

}  // namespace feedrank
