#include "recbench/adapters.hpp"

#include <algorithm>
#include <charconv>
#include <random>
#include <unordered_map>

#include "recbench/error.hpp"

namespace recbench {

RunSource parse_run_source(std::string_view text) {
  if (text == "llm") return RunSource::llm;
  if (text == "builtin") return RunSource::builtin;
  if (text == "external") return RunSource::external;
  throw ConfigError("unknown model type '" + std::string(text) + "' (expected llm, builtin or external)");
}

std::string_view to_string(RunSource source) {
  switch (source) {
    case RunSource::llm: return "llm";
    case RunSource::builtin: return "builtin";
    case RunSource::external: return "external";
  }
  return "unknown";
}

std::string SequenceMode::label() const {
  return is_full() ? std::string("full") : "few_shot_" + std::to_string(few_shot);
}

SequenceMode parse_sequence_mode(std::string_view text) {
  if (text == "full") return {};
  constexpr std::string_view prefix = "few_shot_";
  if (text.starts_with(prefix)) {
    int n = 0;
    auto digits = text.substr(prefix.size());
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && n >= 1) return {n};
  }
  throw ConfigError("unknown sequence mode '" + std::string(text) + "' (expected full or few_shot_<n>)");
}

std::vector<ItemId> apply_sequence_mode(const std::vector<ItemId>& history, SequenceMode mode) {
  if (mode.is_full() || history.size() <= static_cast<std::size_t>(mode.few_shot)) return history;
  return {history.end() - mode.few_shot, history.end()};
}

BuiltinKind parse_builtin_kind(std::string_view text) {
  if (text == "popularity") return BuiltinKind::popularity;
  if (text == "random") return BuiltinKind::random;
  throw ConfigError("unknown builtin kind '" + std::string(text) + "' (expected popularity or random)");
}

std::string_view to_string(BuiltinKind kind) {
  return kind == BuiltinKind::popularity ? "popularity" : "random";
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform in [0, bound) by rejection; std::uniform_int_distribution is not portable bit-for-bit.
std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = gen();
  while (x >= limit) x = gen();
  return x % bound;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, UserId user, int run) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(user));
  return splitmix64(h ^ static_cast<std::uint64_t>(run));
}

std::vector<ItemId> builtin_recommend(BuiltinKind kind, const ItemStatsMap& stats,
                                      ItemId universe_size, int k, std::uint64_t seed) {
  if (k < 1) throw Error("K must be >= 1");
  if (universe_size < 1 || k > universe_size) {
    throw Error("K (" + std::to_string(k) + ") exceeds the item universe (" +
                std::to_string(universe_size) + ")");
  }
  const auto want = static_cast<std::size_t>(k);

  if (kind == BuiltinKind::popularity) {
    std::vector<std::pair<std::int64_t, ItemId>> ranked;
    ranked.reserve(static_cast<std::size_t>(universe_size));
    for (ItemId id = 1; id <= universe_size; ++id) {
      auto it = stats.find(id);
      ranked.emplace_back(it == stats.end() ? 0 : it->second.popularity, id);
    }
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(want), ranked.end(),
                      [](const auto& a, const auto& b) {
                        return a.first != b.first ? a.first > b.first : a.second < b.second;
                      });
    std::vector<ItemId> out;
    out.reserve(want);
    for (std::size_t i = 0; i < want; ++i) out.push_back(ranked[i].second);
    return out;
  }

  // Partial Fisher-Yates over the virtual array [1..N] with a sparse swap table.
  std::mt19937_64 gen(seed);
  std::unordered_map<std::uint64_t, std::uint64_t> swapped;
  auto at = [&](std::uint64_t i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  const auto n = static_cast<std::uint64_t>(universe_size);
  std::vector<ItemId> out;
  out.reserve(want);
  for (std::uint64_t i = 0; i < want; ++i) {
    const std::uint64_t j = i + bounded(gen, n - i);
    const std::uint64_t vi = at(i);
    const std::uint64_t vj = at(j);
    swapped[j] = vi;
    swapped[i] = vj;
    out.push_back(static_cast<ItemId>(vj + 1));
  }
  return out;
}

ExtractedList to_extracted(const RecommendationRun& run, ItemId universe_size, int k) {
  if (run.failed) {
    ExtractedList empty;
    empty.user = run.user;
    empty.run = run.run;
    return empty;
  }
  if (run.source == RunSource::llm) {
    return extract_and_validate(run.raw_text, universe_size, k, run.user, run.run);
  }
  return validate_ids(run.items, universe_size, k, run.user, run.run);
}

}  // namespace recbench
