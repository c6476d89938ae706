#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "feedrank/events.hpp"
#include "feedrank/index_engine.hpp"
#include "feedrank/state_space.hpp"

namespace feedrank {

enum class Policy { kIndex, kNovelty, kPopularity };

std::string_view to_string(Policy policy);
std::optional<Policy> parse_policy(std::string_view text);

struct RankedItem {
  std::string item_id;
  StateId state = kUnknownState;

  bool operator==(const RankedItem&) const = default;
};

struct RankingSnapshot {
  std::int64_t minute = 0;
  Policy policy = Policy::kIndex;
  std::vector<RankedItem> items;  // best first

  bool operator==(const RankingSnapshot&) const = default;
};

// Orders `active` (indices into timelines.items()) for decision minute t.
//   index:      descending index of the item's state
//   novelty:    most recent post first
//   popularity: most retweets before t first
// Ties: more recent post first, then item id ascending. `states` holds
// each active item's state at t. `table` is required for Policy::kIndex.
std::vector<std::size_t> order_items(const Timelines& timelines,
                                     std::span<const std::size_t> active,
                                     std::span<const StateId> states, std::int64_t t,
                                     Policy policy, const IndexTable* table);

RankingSnapshot rank_items(std::int64_t t, const Timelines& timelines,
                           const StateSpace& space, const IndexTable* table, Policy policy,
                           std::int64_t horizon = 60);

std::vector<std::string> top_k(const RankingSnapshot& snapshot, std::size_t k);

// minute,policy,rank,item_id,state_index (rank 1-based)
void write_snapshot_csv_header(std::ostream& out);
void write_snapshot_csv(std::ostream& out, const RankingSnapshot& snapshot);

}  // namespace feedrank
