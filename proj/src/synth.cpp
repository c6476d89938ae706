#include "feedrank/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "feedrank/error.hpp"

namespace feedrank {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(seed ^ splitmix64(stream)) + index);
}

std::string numbered(const char* prefix, std::int64_t value, int width) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%0*lld", prefix, width, static_cast<long long>(value));
  return buf;
}

// Integral of x^-alpha over [k, k+1].
double cell_mass(double k, double alpha) {
  return (std::pow(k, 1.0 - alpha) - std::pow(k + 1.0, 1.0 - alpha)) / (alpha - 1.0);
}

struct PlannedPost {
  std::int64_t ts;
  std::string account;
};

std::vector<PlannedPost> plan_posts(const GeneratorConfig& config) {
  std::mt19937_64 rng(derive_seed(config.seed, 1, 0));
  std::discrete_distribution<int> hour(config.hour_weights.begin(), config.hour_weights.end());
  std::uniform_int_distribution<std::int64_t> second(0, 3599);
  std::uniform_int_distribution<int> account(0, config.n_accounts - 1);

  std::vector<PlannedPost> posts;
  for (int day = 0; day < config.days; ++day) {
    const int weekday = (day % 7);  // start_ts is a Monday
    const double rate = config.posts_per_day * (weekday >= 5 ? config.weekend_factor : 1.0);
    std::poisson_distribution<std::int64_t> count(rate);
    const auto n = rate > 0.0 ? count(rng) : 0;
    for (std::int64_t k = 0; k < n; ++k) {
      const auto ts = config.start_ts + std::int64_t{day} * 86400 + std::int64_t{hour(rng)} * 3600 +
                      second(rng);
      posts.push_back({ts, numbered("acct", account(rng), 2)});
    }
  }
  std::stable_sort(posts.begin(), posts.end(),
                   [](const auto& a, const auto& b) { return a.ts < b.ts; });
  return posts;
}

std::vector<Event> engagement_for(const GeneratorConfig& config, const std::array<double, 60>& profile,
                                  const std::string& item_id, std::int64_t post_ts,
                                  std::uint64_t item_seed) {
  std::mt19937_64 rng(item_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Event> out;

  std::int64_t magnitude = 0;
  if (unit(rng) >= config.zero_fraction) {
    do {
      magnitude = draw_power_law(rng, config.alpha, config.x_min);
    } while (magnitude > config.max_magnitude);
  }
  if (magnitude == 0) return out;

  std::array<double, 60> weights = profile;
  std::normal_distribution<double> noise(0.0, config.jitter_sigma);
  for (auto& w : weights) w *= std::exp(noise(rng));
  std::discrete_distribution<int> minute(weights.begin(), weights.end());
  std::uniform_int_distribution<std::int64_t> second(0, 59);
  std::poisson_distribution<int> replies(config.reply_rate);
  std::poisson_distribution<int> favorites(config.favorite_rate);

  std::int64_t n_reply = 0, n_fav = 0;
  auto emit = [&](EventKind kind, const char* tag, std::int64_t serial, std::int64_t slot) {
    const auto ts = post_ts + slot * 60 + second(rng);
    out.push_back({kind, item_id, item_id + numbered(tag, serial, 1), ts, ""});
  };
  for (std::int64_t r = 0; r < magnitude; ++r) {
    const auto slot = std::int64_t{minute(rng)};
    emit(EventKind::kRetweet, "-rt", r, slot);
    if (config.reply_rate > 0.0)
      for (int k = replies(rng); k > 0; --k) emit(EventKind::kReply, "-re", n_reply++, slot);
    if (config.favorite_rate > 0.0)
      for (int k = favorites(rng); k > 0; --k) emit(EventKind::kFavorite, "-fa", n_fav++, slot);
  }
  return out;
}

void sort_events(std::vector<Event>& events) {
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.ts != b.ts) return a.ts < b.ts;
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.event_id < b.event_id;
  });
}

template <typename Engage>
std::vector<Event> assemble_stream(const GeneratorConfig& config, Engage&& engage_all) {
  config.validate();
  const auto posts = plan_posts(config);
  if (posts.empty()) throw DataError("generator configuration produced no posts");

  std::vector<std::string> ids(posts.size());
  for (std::size_t i = 0; i < posts.size(); ++i)
    ids[i] = numbered("p", static_cast<std::int64_t>(i), 6);

  std::vector<std::vector<Event>> engagement(posts.size());
  engage_all(posts, ids, engagement);

  std::vector<Event> events;
  for (std::size_t i = 0; i < posts.size(); ++i) {
    events.push_back({EventKind::kPost, ids[i], ids[i], posts[i].ts, posts[i].account});
    for (auto& e : engagement[i]) events.push_back(std::move(e));
  }
  sort_events(events);
  return events;
}

}  // namespace

void GeneratorConfig::validate() const {
  if (days < 0 || n_accounts < 1) throw ConfigError("generator needs days >= 0 and accounts >= 1");
  if (!(posts_per_day >= 0.0) || !(weekend_factor >= 0.0))
    throw ConfigError("posting rates must be non-negative");
  if (std::any_of(hour_weights.begin(), hour_weights.end(), [](double w) { return !(w >= 0.0); }) ||
      std::accumulate(hour_weights.begin(), hour_weights.end(), 0.0) <= 0.0)
    throw ConfigError("hour weights must be non-negative with a positive sum");
  if (!(zero_fraction >= 0.0 && zero_fraction <= 1.0))
    throw ConfigError("zero fraction must lie in [0, 1]");
  if (!(alpha > 1.0)) throw ConfigError("power-law exponent must exceed 1");
  if (x_min < 1 || max_magnitude < x_min) throw ConfigError("need 1 <= x_min <= max_magnitude");
  if (!(gamma > 0.0)) throw ConfigError("decay exponent must be positive");
  if (std::any_of(head_weights.begin(), head_weights.end(), [](double w) { return !(w >= 0.0); }))
    throw ConfigError("head weights must be non-negative");
  if (!(jitter_sigma >= 0.0) || !(reply_rate >= 0.0) || !(favorite_rate >= 0.0))
    throw ConfigError("jitter and engagement rates must be non-negative");
}

std::int64_t draw_power_law(std::mt19937_64& rng, double alpha, std::int64_t x_min) {
  // Rejection from the continuous Pareto envelope floor(Y), Y >= x_min.
  // Acceptance ratio k^-alpha / cell_mass(k) falls toward 1 as k grows.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double lo = static_cast<double>(x_min);
  const double top = std::pow(lo, -alpha) / cell_mass(lo, alpha);
  for (;;) {
    const double u = 1.0 - unit(rng);  // (0, 1]
    const double y = lo * std::pow(u, -1.0 / (alpha - 1.0));
    if (!(y < 9.0e18)) continue;
    const double k = std::floor(y);
    const double accept = (std::pow(k, -alpha) / cell_mass(k, alpha)) / top;
    if (unit(rng) < accept) return static_cast<std::int64_t>(k);
  }
}

std::array<double, 60> decay_profile(const GeneratorConfig& config) {
  std::array<double, 60> w{};
  for (int m = 1; m <= 60; ++m)
    w[static_cast<std::size_t>(m - 1)] =
        m <= 3 ? config.head_weights[static_cast<std::size_t>(m - 1)]
               : config.head_weights[2] * std::pow(m / 3.0, -config.gamma);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) throw ConfigError("decay profile has no mass");
  for (auto& x : w) x /= total;
  return w;
}

std::vector<Event> generate_stream(const GeneratorConfig& config) {
  return assemble_stream(config, [&](const auto& posts, const auto& ids, auto& engagement) {
    const auto profile = decay_profile(config);
    const auto n = static_cast<std::int64_t>(posts.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < n; ++i) {
      const auto si = static_cast<std::size_t>(i);
      engagement[si] = engagement_for(config, profile, ids[si], posts[si].ts,
                                      derive_seed(config.seed, 2, static_cast<std::uint64_t>(i)));
    }
  });
}

namespace serial {

std::vector<Event> generate_stream(const GeneratorConfig& config) {
  return assemble_stream(config, [&](const auto& posts, const auto& ids, auto& engagement) {
    const auto profile = decay_profile(config);
    for (std::size_t i = 0; i < posts.size(); ++i)
      engagement[i] = engagement_for(config, profile, ids[i], posts[i].ts,
                                     derive_seed(config.seed, 2, static_cast<std::uint64_t>(i)));
  });
}

}  // namespace serial

std::vector<Event> generate_markov_stream(const BinSpec& bins, const Matrix& p1,
                                          const MarkovStreamConfig& config) {
  bins.validate();
  const int n = bins.state_count();
  if (p1.rows() != n || p1.cols() != n) throw ConfigError("p1 does not match the state space");
  if (config.n_items < 0 || config.minutes_between_posts < 0)
    throw ConfigError("item count and spacing must be non-negative");
  for (int i = 0; i < n; ++i) {
    if ((p1.row(i).array() < 0.0).any() || std::abs(p1.row(i).sum() - 1.0) > 1e-9)
      throw ConfigError("p1 row " + std::to_string(i) + " is not stochastic");
    if (i == kUnknownState) continue;
    const auto from = bins_of(i, bins).popularity;
    for (int j = 1; j < n; ++j)
      if (p1(i, j) > 0.0 && bins_of(j, bins).popularity < from)
        throw ConfigError("p1 moves state " + state_label(i, bins) + " to lower popularity " +
                          state_label(j, bins));
  }

  const auto first_age = bins.novelty_limits.front();
  const auto exit_age = bins.novelty_limits.back();
  const auto& lim_p = bins.popularity_limits;

  std::vector<Event> events;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::int64_t item = 0; item < config.n_items; ++item) {
    std::mt19937_64 rng(derive_seed(config.seed, 3, static_cast<std::uint64_t>(item)));
    const auto id = numbered("m", item, 7);
    const auto post_minute = config.start_minute + item * config.minutes_between_posts;
    events.push_back({EventKind::kPost, id, id, post_minute * 60, ""});

    StateId state = kUnknownState;
    std::int64_t count = 0;
    std::int64_t emitted = 0;
    for (auto age = first_age; age < exit_age; ++age) {
      const int novelty = bins_of(classify(age, 0, bins), bins).novelty;
      double mass = 0.0;
      for (int p = 1; p <= bins.popularity_bins(); ++p)
        mass += p1(state, state_of({novelty, p}, bins));
      if (!(mass > 0.0))
        throw ConfigError("p1 row " + state_label(state, bins) + " has no successor at age " +
                          std::to_string(age));
      double u = unit(rng) * mass;
      int next_p = 0;
      for (int p = 1; p <= bins.popularity_bins(); ++p) {
        const double w = p1(state, state_of({novelty, p}, bins));
        if (w <= 0.0) continue;
        next_p = p;
        if (u < w) break;
        u -= w;
      }
      const auto target = lim_p[static_cast<std::size_t>(next_p - 1)];
      // retweets in the minute before `age` count toward the state at `age`
      for (; count < target; ++count, ++emitted)
        events.push_back({EventKind::kRetweet, id, id + numbered("-rt", emitted, 1),
                          (post_minute + age - 1) * 60 + (emitted % 60), ""});
      state = state_of({novelty, next_p}, bins);
    }
  }
  sort_events(events);
  return events;
}

}  // namespace feedrank
