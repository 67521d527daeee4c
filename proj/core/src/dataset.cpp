#include "recbench/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "recbench/error.hpp"

namespace recbench {

std::string_view ItemRecord::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return v;
  }
  return {};
}

const ItemRecord* NormalizedDataset::find_item(ItemId id) const {
  auto it = std::lower_bound(catalog.begin(), catalog.end(), id,
                             [](const ItemRecord& r, ItemId v) { return r.id < v; });
  if (it == catalog.end() || it->id != id) return nullptr;
  return &*it;
}

std::size_t NormalizedDataset::user_count() const {
  std::set<UserId> users;
  for (const auto& r : interactions) users.insert(r.user);
  return users.size();
}

DatasetFormat parse_dataset_format(std::string_view text) {
  if (text == "ml100k") return DatasetFormat::ml100k;
  if (text == "beauty" || text == "beauty_json") return DatasetFormat::beauty;
  if (text == "yelp" || text == "yelp_json") return DatasetFormat::yelp;
  if (text == "normalized") return DatasetFormat::normalized;
  throw ConfigError("unknown dataset format '" + std::string(text) +
                    "' (expected ml100k, beauty, yelp or normalized)");
}

std::string_view to_string(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::ml100k: return "ml100k";
    case DatasetFormat::beauty: return "beauty";
    case DatasetFormat::yelp: return "yelp";
    case DatasetFormat::normalized: return "normalized";
  }
  return "unknown";
}

DatasetSpec default_spec(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::ml100k: return {"ML-100K", 5, 50, 0.9};
    case DatasetFormat::beauty: return {"Beauty", 5, 50, 0.9};
    case DatasetFormat::yelp: return {"Yelp", 10, 100, 0.9};
    case DatasetFormat::normalized: return {"dataset", 5, 50, 0.9};
  }
  return {};
}

NormalizedDataset filter_users(NormalizedDataset dataset, int min_interactions) {
  std::unordered_map<UserId, int> counts;
  for (const auto& r : dataset.interactions) ++counts[r.user];

  std::size_t dropped_users = 0;
  for (const auto& [user, n] : counts) {
    if (n < min_interactions) ++dropped_users;
  }
  std::erase_if(dataset.interactions,
                [&](const RawInteraction& r) { return counts[r.user] < min_interactions; });
  if (dropped_users > 0) {
    spdlog::info("{}: dropped {} users with fewer than {} interactions", dataset.name,
                 dropped_users, min_interactions);
  }
  return dataset;
}

NormalizedDataset ingest(const DatasetSpec& spec, const std::filesystem::path& source,
                         DatasetFormat format) {
  return prepare_dataset(load_dataset(source, format, spec.name), spec);
}

NormalizedDataset prepare_dataset(NormalizedDataset dataset, const DatasetSpec& spec) {
  dataset = filter_users(std::move(dataset), spec.min_interactions);

  std::set<ItemId> missing;
  for (const auto& r : dataset.interactions) {
    if (!dataset.find_item(r.item)) missing.insert(r.item);
  }
  if (!missing.empty()) {
    spdlog::warn("{}: {} referenced items have no catalog entry; using empty attributes",
                 dataset.name, missing.size());
    for (ItemId id : missing) dataset.catalog.push_back(ItemRecord{id, {}});
    std::sort(dataset.catalog.begin(), dataset.catalog.end(),
              [](const ItemRecord& a, const ItemRecord& b) { return a.id < b.id; });
  }
  return dataset;
}

namespace {

// Indices into dataset.interactions grouped by user, each group in file order.
std::map<UserId, std::vector<std::size_t>> group_by_user(const NormalizedDataset& dataset) {
  std::map<UserId, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < dataset.interactions.size(); ++i) {
    groups[dataset.interactions[i].user].push_back(i);
  }
  return groups;
}

// floor(ratio * n) without letting 0.9 * 10 round down to 8.
std::size_t history_cut(std::size_t n, double ratio) {
  const double scaled = ratio * static_cast<double>(n);
  auto cut = static_cast<std::size_t>(scaled);
  if (static_cast<double>(cut + 1) - scaled <= 1e-9 * std::max(1.0, scaled)) ++cut;
  return std::min(cut, n);
}

}  // namespace

std::vector<UserSequence> build_eval_set(const NormalizedDataset& dataset, const DatasetSpec& spec,
                                         EvalSetSummary* summary) {
  std::vector<UserSequence> out;
  std::size_t excluded = 0;
  const auto max_len = static_cast<std::size_t>(std::max(1, spec.max_seq_len));

  for (auto& [user, indices] : group_by_user(dataset)) {
    std::stable_sort(indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
      return dataset.interactions[a].timestamp < dataset.interactions[b].timestamp;
    });
    const std::size_t n = indices.size();
    const std::size_t cut = history_cut(n, spec.split_ratio);
    if (cut == 0 || cut >= n) {
      ++excluded;
      continue;
    }
    UserSequence seq;
    seq.user = user;
    const std::size_t begin = cut > max_len ? cut - max_len : 0;
    for (std::size_t i = begin; i < cut; ++i) {
      const auto& r = dataset.interactions[indices[i]];
      seq.history.push_back(r.item);
      seq.history_ratings.push_back(r.rating);
    }
    seq.ground_truth = dataset.interactions[indices[cut]].item;
    out.push_back(std::move(seq));
  }

  if (excluded > 0) {
    spdlog::info("{}: excluded {} users with no held-out interaction", dataset.name, excluded);
  }
  if (summary) {
    summary->users = out.size();
    summary->excluded_no_remainder = excluded;
  }
  return out;
}

namespace {

std::optional<double> parse_double(std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace

ItemStatsMap compute_item_stats(const NormalizedDataset& dataset,
                                const std::vector<UserSequence>& eval_set) {
  ItemStatsMap stats;
  std::map<ItemId, double> rating_sums;
  for (const auto& item : dataset.catalog) stats[item.id].id = item.id;

  for (const auto& seq : eval_set) {
    for (std::size_t i = 0; i < seq.history.size(); ++i) {
      auto& s = stats[seq.history[i]];
      s.id = seq.history[i];
      ++s.popularity;
      if (i < seq.history_ratings.size()) rating_sums[seq.history[i]] += seq.history_ratings[i];
    }
  }

  for (auto& [id, s] : stats) {
    const ItemRecord* record = dataset.find_item(id);
    if (record) {
      if (auto intrinsic = parse_double(record->attribute(kIntrinsicQualityKey))) {
        s.quality = *intrinsic;
        continue;
      }
    }
    if (s.popularity > 0) s.quality = rating_sums[id] / static_cast<double>(s.popularity);
  }
  return stats;
}

void write_normalized(const NormalizedDataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "interactions.jsonl", std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / "interactions.jsonl").string());
    for (const auto& r : dataset.interactions) {
      nlohmann::ordered_json line;
      line["user"] = r.user;
      line["item"] = r.item;
      line["rating"] = r.rating;
      line["ts"] = r.timestamp;
      out << line.dump() << '\n';
    }
  }
  std::ofstream out(dir / "items.jsonl", std::ios::binary);
  if (!out) throw Error("cannot write " + (dir / "items.jsonl").string());
  for (const auto& item : dataset.catalog) {
    nlohmann::ordered_json line;
    line["item"] = item.id;
    line["attrs"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : item.attributes) line["attrs"][k] = v;
    out << line.dump() << '\n';
  }
}

}  // namespace recbench
