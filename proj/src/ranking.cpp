#include "feedrank/ranking.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "feedrank/error.hpp"

namespace feedrank {

namespace {
constexpr std::string_view kPolicyNames[] = {"index", "novelty", "popularity"};
}

std::string_view to_string(Policy policy) { return kPolicyNames[static_cast<int>(policy)]; }

std::optional<Policy> parse_policy(std::string_view text) {
  for (int i = 0; i < 3; ++i)
    if (kPolicyNames[i] == text) return static_cast<Policy>(i);
  return std::nullopt;
}

std::vector<std::size_t> order_items(const Timelines& timelines,
                                     std::span<const std::size_t> active,
                                     std::span<const StateId> states, std::int64_t t,
                                     Policy policy, const IndexTable* table) {
  if (policy == Policy::kIndex && table == nullptr)
    throw ConfigError("index policy needs an index table");
  const auto items = timelines.items();

  std::vector<double> key(active.size(), 0.0);
  for (std::size_t k = 0; k < active.size(); ++k) {
    const auto& item = items[active[k]];
    switch (policy) {
      case Policy::kIndex: key[k] = table->g[static_cast<std::size_t>(states[k])]; break;
      case Policy::kNovelty: key[k] = static_cast<double>(item.post_ts()); break;
      case Policy::kPopularity: key[k] = static_cast<double>(item.retweets_before(t)); break;
    }
  }

  std::vector<std::size_t> pos(active.size());
  std::iota(pos.begin(), pos.end(), 0);
  std::sort(pos.begin(), pos.end(), [&](std::size_t a, std::size_t b) {
    if (key[a] != key[b]) return key[a] > key[b];
    const auto& ia = items[active[a]];
    const auto& ib = items[active[b]];
    if (ia.post_ts() != ib.post_ts()) return ia.post_ts() > ib.post_ts();
    return ia.item_id() < ib.item_id();
  });
  return pos;
}

RankingSnapshot rank_items(std::int64_t t, const Timelines& timelines,
                           const StateSpace& space, const IndexTable* table, Policy policy,
                           std::int64_t horizon) {
  const auto active = timelines.active_indices(t, horizon);
  std::vector<StateId> states;
  states.reserve(active.size());
  for (auto idx : active) states.push_back(space.state_at(timelines.items()[idx], t));

  RankingSnapshot snapshot{t, policy, {}};
  for (auto k : order_items(timelines, active, states, t, policy, table))
    snapshot.items.push_back({timelines.items()[active[k]].item_id(), states[k]});
  return snapshot;
}

std::vector<std::string> top_k(const RankingSnapshot& snapshot, std::size_t k) {
  std::vector<std::string> out;
  const auto n = std::min(k, snapshot.items.size());
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(snapshot.items[i].item_id);
  return out;
}

void write_snapshot_csv_header(std::ostream& out) {
  out << "minute,policy,rank,item_id,state_index\n";
}

void write_snapshot_csv(std::ostream& out, const RankingSnapshot& snapshot) {
  for (std::size_t r = 0; r < snapshot.items.size(); ++r)
    out << snapshot.minute << ',' << to_string(snapshot.policy) << ',' << r + 1 << ','
        << snapshot.items[r].item_id << ',' << snapshot.items[r].state << '\n';
}

}  // namespace feedrank
