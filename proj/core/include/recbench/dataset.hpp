#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace recbench {

using UserId = std::int64_t;
using ItemId = std::int64_t;

struct RawInteraction {
  UserId user = 0;
  ItemId item = 0;
  double rating = 0.0;
  std::int64_t timestamp = 0;

  friend bool operator==(const RawInteraction&, const RawInteraction&) = default;
};

// Attribute order is the dataset's declared order and is preserved end to end.
using AttributeList = std::vector<std::pair<std::string, std::string>>;

struct ItemRecord {
  ItemId id = 0;
  AttributeList attributes;

  // Empty view when the key is absent.
  std::string_view attribute(std::string_view key) const;
};

struct ItemStats {
  ItemId id = 0;
  std::int64_t popularity = 0;
  std::optional<double> quality;
};

using ItemStatsMap = std::map<ItemId, ItemStats>;

struct NormalizedDataset {
  std::string name;
  std::vector<RawInteraction> interactions;  // input-file order
  std::vector<ItemRecord> catalog;           // ascending item id
  ItemId universe_size = 0;

  const ItemRecord* find_item(ItemId id) const;
  std::size_t user_count() const;
};

struct UserSequence {
  UserId user = 0;
  std::vector<ItemId> history;         // oldest to newest
  std::vector<double> history_ratings;  // parallel to history
  ItemId ground_truth = 0;

  friend bool operator==(const UserSequence&, const UserSequence&) = default;
};

enum class DatasetFormat { ml100k, beauty, yelp, normalized };

DatasetFormat parse_dataset_format(std::string_view text);
std::string_view to_string(DatasetFormat format);

struct DatasetSpec {
  std::string name;
  int min_interactions = 5;
  int max_seq_len = 50;
  double split_ratio = 0.9;
};

// Per-dataset preprocessing defaults: 5/50 for ML-100K and Beauty, 10/100 for Yelp.
DatasetSpec default_spec(DatasetFormat format);

// Attribute key that carries a dataset-intrinsic item quality score (Yelp).
inline constexpr std::string_view kIntrinsicQualityKey = "Stars";

// Raw, unfiltered load of a native or normalized source.
NormalizedDataset load_dataset(const std::filesystem::path& source, DatasetFormat format,
                               std::string name = {});

// Drops users with fewer than `min_interactions` interactions.
NormalizedDataset filter_users(NormalizedDataset dataset, int min_interactions);

// filter_users plus catalog completion: items referenced without a catalog entry get an
// empty-attribute record and a warning.
NormalizedDataset prepare_dataset(NormalizedDataset raw, const DatasetSpec& spec);

// load_dataset followed by prepare_dataset.
NormalizedDataset ingest(const DatasetSpec& spec, const std::filesystem::path& source,
                         DatasetFormat format);

struct EvalSetSummary {
  std::size_t users = 0;
  std::size_t excluded_no_remainder = 0;
};

// Chronological split: first floor(ratio * n) interactions are history (truncated to the most
// recent max_seq_len), the next one is the ground truth. Sorted by ascending user id.
std::vector<UserSequence> build_eval_set(const NormalizedDataset& dataset, const DatasetSpec& spec,
                                         EvalSetSummary* summary = nullptr);

// Popularity and quality over history portions only; held-out items never count.
ItemStatsMap compute_item_stats(const NormalizedDataset& dataset,
                                const std::vector<UserSequence>& eval_set);

// Canonical interchange: interactions.jsonl + items.jsonl in `dir`.
void write_normalized(const NormalizedDataset& dataset, const std::filesystem::path& dir);

}  // namespace recbench
