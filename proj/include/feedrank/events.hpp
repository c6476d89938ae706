#pragma once

#include <bitset>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace feedrank {

enum class EventKind { kPost, kRetweet, kReply, kFavorite };

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

// One engagement record. For posts, item_id == event_id.
struct Event {
  EventKind kind = EventKind::kPost;
  std::string item_id;
  std::string event_id;
  std::int64_t ts = 0;  // seconds since epoch
  std::string account;

  bool operator==(const Event&) const = default;
};

constexpr std::int64_t minute_of(std::int64_t ts) {
  return ts >= 0 ? ts / 60 : -((-ts + 59) / 60);
}

// UTC hour of day for a minute index.
constexpr int utc_hour_of_minute(std::int64_t minute) {
  return static_cast<int>((minute / 60) % 24);
}

// Reads newline-delimited event records. Blank lines and lines starting
// with '#' are skipped. Throws DataError naming the 1-based line number.
std::vector<Event> parse_event_log(std::istream& in);
std::vector<Event> parse_event_log(std::string_view text);

std::string format_event(const Event& event);
void write_event_log(std::ostream& out, std::span<const Event> events);

struct MinuteCounts {
  std::int64_t retweets = 0;
  std::int64_t replies = 0;
  std::int64_t favorites = 0;

  bool operator==(const MinuteCounts&) const = default;
};

// Per-minute engagement of a single post. Minutes are floor(ts / 60).
class ItemTimeline {
 public:
  ItemTimeline(std::string item_id, std::int64_t post_ts, std::string account);

  const std::string& item_id() const { return item_id_; }
  const std::string& account() const { return account_; }
  std::int64_t post_ts() const { return post_ts_; }
  std::int64_t post_minute() const { return minute_of(post_ts_); }

  // Minutes with at least one engagement, ascending.
  std::span<const std::int64_t> active_minutes() const { return minutes_; }
  bool empty() const { return minutes_.empty(); }

  MinuteCounts counts_at(std::int64_t minute) const;
  // Retweets in minutes <= minute.
  std::int64_t retweets_through(std::int64_t minute) const;
  // Retweets in minutes < minute.
  std::int64_t retweets_before(std::int64_t minute) const {
    return retweets_through(minute - 1);
  }
  std::int64_t total_retweets() const {
    return cumulative_retweets_.empty() ? 0 : cumulative_retweets_.back();
  }

 private:
  friend class TimelineBuilder;

  std::string item_id_;
  std::string account_;
  std::int64_t post_ts_;
  std::vector<std::int64_t> minutes_;
  std::vector<MinuteCounts> counts_;
  std::vector<std::int64_t> cumulative_retweets_;
};

// All item timelines of a log, ordered by (post_ts, item_id).
class Timelines {
 public:
  Timelines() = default;
  explicit Timelines(std::vector<ItemTimeline> items);

  std::span<const ItemTimeline> items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const ItemTimeline* find(std::string_view item_id) const;

  // Indices into items() with 0 < t - post_minute <= horizon, in item order.
  std::vector<std::size_t> active_indices(std::int64_t t,
                                          std::int64_t horizon = 60) const;

  // Smallest post minute and largest minute carrying any event.
  std::int64_t first_minute() const;
  std::int64_t last_minute() const;

 private:
  std::vector<ItemTimeline> items_;
  std::vector<std::int64_t> post_minutes_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

// Throws DataError on orphan engagement or engagement before its post.
Timelines build_timelines(std::span<const Event> events);

// Half-open minute range [begin, end).
struct MinuteWindow {
  std::int64_t begin = 0;
  std::int64_t end = 0;

  bool contains(std::int64_t minute) const { return minute >= begin && minute < end; }
  bool empty() const { return end <= begin; }
  bool overlaps(const MinuteWindow& other) const {
    return begin < other.end && other.begin < end;
  }
  bool operator==(const MinuteWindow&) const = default;
};

// Set of UTC hours of day.
using HourSet = std::bitset<24>;

// Parses "12-1" (inclusive, wrapping past midnight) or "9,10,11" or a mix.
HourSet parse_hour_set(std::string_view text);
std::string format_hour_set(const HourSet& hours);

// Items whose post minute lies in the window and, when given, whose post
// hour is in the hour set.
std::vector<std::size_t> items_posted_in(const Timelines& timelines,
                                         const MinuteWindow& window,
                                         const HourSet* hours = nullptr);

std::vector<std::string> active_set(const Timelines& timelines, std::int64_t t,
                                    std::int64_t horizon = 60);

}  // namespace feedrank
