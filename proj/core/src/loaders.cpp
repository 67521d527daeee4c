// Native dataset adapters onto NormalizedDataset.

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <unordered_map>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "recbench/dataset.hpp"
#include "recbench/error.hpp"

namespace recbench {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::array<std::string_view, 19> kMovieLensGenres = {
    "unknown", "Action",   "Adventure", "Animation", "Children's", "Comedy", "Crime",
    "Documentary", "Drama", "Fantasy", "Film-Noir", "Horror", "Musical", "Mystery",
    "Romance", "Sci-Fi", "Thriller", "War", "Western"};

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return in;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && !text.empty();
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

// MovieLens ships ISO-8859-1 text; prompts are UTF-8.
std::string latin1_to_utf8(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (unsigned char c : in) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

void check_rating(double rating, const fs::path& file, std::size_t line_no) {
  if (!(rating >= 1.0 && rating <= 5.0)) {
    throw ParseError(file.string(), line_no, "rating outside [1,5]");
  }
}

void finalize(NormalizedDataset& dataset) {
  std::sort(dataset.catalog.begin(), dataset.catalog.end(),
            [](const ItemRecord& a, const ItemRecord& b) { return a.id < b.id; });
  auto dup = std::adjacent_find(dataset.catalog.begin(), dataset.catalog.end(),
                                [](const ItemRecord& a, const ItemRecord& b) { return a.id == b.id; });
  if (dup != dataset.catalog.end()) {
    throw Error(dataset.name + ": duplicate catalog entry for item " + std::to_string(dup->id));
  }
  ItemId max_id = dataset.catalog.empty() ? 0 : dataset.catalog.back().id;
  for (const auto& r : dataset.interactions) max_id = std::max(max_id, r.item);
  dataset.universe_size = max_id;
}

// Dense 1-based ids for string keys, assigned in first-appearance order.
class IdMap {
 public:
  std::int64_t get_or_assign(const std::string& key) {
    auto [it, inserted] = ids_.try_emplace(key, static_cast<std::int64_t>(ids_.size()) + 1);
    return it->second;
  }
  const std::int64_t* find(const std::string& key) const {
    auto it = ids_.find(key);
    return it == ids_.end() ? nullptr : &it->second;
  }

 private:
  std::unordered_map<std::string, std::int64_t> ids_;
};

std::string json_text(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_array()) {
    std::string out;
    for (const auto& v : value) {
      std::string part = json_text(v);
      if (part.empty()) continue;
      if (!out.empty()) out += ", ";
      out += part;
    }
    return out;
  }
  if (value.is_number()) return value.dump();
  return {};
}

json parse_json_line(const std::string& line, const fs::path& file, std::size_t line_no) {
  try {
    json value = json::parse(line);
    if (!value.is_object()) throw ParseError(file.string(), line_no, "expected a JSON object");
    return value;
  } catch (const json::exception& e) {
    throw ParseError(file.string(), line_no, e.what());
  }
}

template <typename T>
T required(const json& obj, const char* key, const fs::path& file, std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    throw ParseError(file.string(), line_no, std::string("missing field '") + key + "'");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ParseError(file.string(), line_no, std::string("bad type for field '") + key + "'");
  }
}

// ---------------------------------------------------------------------------------------------

NormalizedDataset load_ml100k(const fs::path& source, std::string name) {
  const fs::path dir = fs::is_directory(source) ? source : source.parent_path();
  NormalizedDataset dataset;
  dataset.name = name.empty() ? "ML-100K" : std::move(name);

  const fs::path data_file = dir / "u.data";
  auto in = open_input(data_file);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    RawInteraction r;
    if (fields.size() != 4 || !parse_number(fields[0], r.user) || !parse_number(fields[1], r.item) ||
        !parse_number(fields[2], r.rating) || !parse_number(fields[3], r.timestamp) ||
        r.user < 1 || r.item < 1) {
      throw ParseError(data_file.string(), line_no, "expected 'user\\titem\\trating\\ttimestamp'");
    }
    check_rating(r.rating, data_file, line_no);
    dataset.interactions.push_back(r);
  }

  const fs::path item_file = dir / "u.item";
  if (!fs::exists(item_file)) {
    spdlog::warn("{}: {} not found; catalog will be synthesized", dataset.name, item_file.string());
  } else {
    auto items = open_input(item_file);
    line_no = 0;
    while (std::getline(items, line)) {
      ++line_no;
      strip_cr(line);
      if (line.empty()) continue;
      auto fields = split(line, '|');
      ItemRecord record;
      if (fields.size() < 5 + kMovieLensGenres.size() || !parse_number(fields[0], record.id) ||
          record.id < 1) {
        throw ParseError(item_file.string(), line_no,
                         "expected 'id|title|release|video release|url|19 genre flags'");
      }
      auto add = [&](const char* key, std::string_view value) {
        if (!value.empty()) record.attributes.emplace_back(key, latin1_to_utf8(value));
      };
      add("Title", fields[1]);
      add("Release Date", fields[2]);
      add("IMDB URL", fields[4]);
      std::string genres;
      for (std::size_t g = 0; g < kMovieLensGenres.size(); ++g) {
        if (fields[5 + g] == "1") {
          if (!genres.empty()) genres += ", ";
          genres += kMovieLensGenres[g];
        }
      }
      add("Category", genres);
      dataset.catalog.push_back(std::move(record));
    }
  }
  finalize(dataset);
  return dataset;
}

// ---------------------------------------------------------------------------------------------

// Picks the first regular file in `dir` whose name contains any of `needles` and not `skip`.
std::optional<fs::path> find_file(const fs::path& dir, std::initializer_list<std::string_view> needles,
                                  std::string_view skip = {}) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const std::string fname = f.filename().string();
    if (!skip.empty() && fname.find(skip) != std::string::npos) continue;
    for (auto needle : needles) {
      if (fname.find(needle) != std::string::npos) return f;
    }
  }
  return std::nullopt;
}

NormalizedDataset load_beauty(const fs::path& source, std::string name) {
  NormalizedDataset dataset;
  dataset.name = name.empty() ? "Beauty" : std::move(name);

  fs::path reviews = source;
  std::optional<fs::path> meta;
  if (fs::is_directory(source)) {
    meta = find_file(source, {"meta"});
    auto found = find_file(source, {"review", "Beauty", "beauty"}, "meta");
    if (!found) throw ParseError(source.string(), 0, "no reviews file found in directory");
    reviews = *found;
  }

  IdMap users;
  IdMap items;
  auto in = open_input(reviews);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    json obj = parse_json_line(line, reviews, line_no);
    RawInteraction r;
    r.user = users.get_or_assign(required<std::string>(obj, "reviewerID", reviews, line_no));
    r.item = items.get_or_assign(required<std::string>(obj, "asin", reviews, line_no));
    r.rating = required<double>(obj, "overall", reviews, line_no);
    r.timestamp = required<std::int64_t>(obj, "unixReviewTime", reviews, line_no);
    check_rating(r.rating, reviews, line_no);
    dataset.interactions.push_back(r);
  }

  if (meta) {
    auto meta_in = open_input(*meta);
    line_no = 0;
    while (std::getline(meta_in, line)) {
      ++line_no;
      strip_cr(line);
      if (line.empty()) continue;
      json obj = parse_json_line(line, *meta, line_no);
      const auto* id = items.find(required<std::string>(obj, "asin", *meta, line_no));
      if (!id) continue;  // product never reviewed
      ItemRecord record{*id, {}};
      for (auto [key, label] : {std::pair{"title", "Title"}, std::pair{"brand", "Brand"},
                                std::pair{"rank", "Rank"}, std::pair{"description", "Description"},
                                std::pair{"category", "Category"}}) {
        if (auto it = obj.find(key); it != obj.end()) {
          std::string text = json_text(*it);
          if (!text.empty()) record.attributes.emplace_back(label, std::move(text));
        }
      }
      dataset.catalog.push_back(std::move(record));
    }
  }
  finalize(dataset);
  return dataset;
}

// ---------------------------------------------------------------------------------------------

// "YYYY-MM-DD[ HH:MM:SS]" as UTC epoch seconds.
std::optional<std::int64_t> parse_datetime(const std::string& text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  const int n = std::sscanf(text.c_str(), "%d-%d-%d %d:%d:%d", &y, &mo, &d, &h, &mi, &s);
  if (n != 3 && n != 6) return std::nullopt;
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 86400 + h * 3600 + mi * 60 + s;
}

NormalizedDataset load_yelp(const fs::path& source, std::string name) {
  NormalizedDataset dataset;
  dataset.name = name.empty() ? "Yelp" : std::move(name);

  fs::path reviews = source;
  std::optional<fs::path> business;
  if (fs::is_directory(source)) {
    auto found = find_file(source, {"review"});
    if (!found) throw ParseError(source.string(), 0, "no review file found in directory");
    reviews = *found;
    business = find_file(source, {"business"});
  }

  IdMap users;
  IdMap items;
  auto in = open_input(reviews);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    json obj = parse_json_line(line, reviews, line_no);
    RawInteraction r;
    r.user = users.get_or_assign(required<std::string>(obj, "user_id", reviews, line_no));
    r.item = items.get_or_assign(required<std::string>(obj, "business_id", reviews, line_no));
    r.rating = required<double>(obj, "stars", reviews, line_no);
    auto date = obj.find("date");
    if (date == obj.end()) throw ParseError(reviews.string(), line_no, "missing field 'date'");
    if (date->is_number_integer()) {
      r.timestamp = date->get<std::int64_t>();
    } else if (auto ts = date->is_string() ? parse_datetime(date->get<std::string>()) : std::nullopt) {
      r.timestamp = *ts;
    } else {
      throw ParseError(reviews.string(), line_no, "unparseable 'date'");
    }
    check_rating(r.rating, reviews, line_no);
    dataset.interactions.push_back(r);
  }

  if (business) {
    auto biz = open_input(*business);
    line_no = 0;
    while (std::getline(biz, line)) {
      ++line_no;
      strip_cr(line);
      if (line.empty()) continue;
      json obj = parse_json_line(line, *business, line_no);
      const auto* id = items.find(required<std::string>(obj, "business_id", *business, line_no));
      if (!id) continue;
      ItemRecord record{*id, {}};
      if (auto it = obj.find("name"); it != obj.end() && it->is_string())
        record.attributes.emplace_back("Name", it->get<std::string>());
      if (auto it = obj.find("stars"); it != obj.end() && it->is_number())
        record.attributes.emplace_back(std::string(kIntrinsicQualityKey), it->dump());
      if (auto it = obj.find("categories"); it != obj.end()) {
        std::string text = json_text(*it);
        if (!text.empty()) record.attributes.emplace_back("Category", std::move(text));
      }
      dataset.catalog.push_back(std::move(record));
    }
  }
  finalize(dataset);
  return dataset;
}

// ---------------------------------------------------------------------------------------------

NormalizedDataset load_normalized(const fs::path& source, std::string name) {
  const fs::path dir = fs::is_directory(source) ? source : source.parent_path();
  NormalizedDataset dataset;
  dataset.name = name.empty() ? dir.filename().string() : std::move(name);

  const fs::path inter_file = dir / "interactions.jsonl";
  auto in = open_input(inter_file);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    json obj = parse_json_line(line, inter_file, line_no);
    RawInteraction r;
    r.user = required<std::int64_t>(obj, "user", inter_file, line_no);
    r.item = required<std::int64_t>(obj, "item", inter_file, line_no);
    r.rating = required<double>(obj, "rating", inter_file, line_no);
    r.timestamp = required<std::int64_t>(obj, "ts", inter_file, line_no);
    if (r.user < 1 || r.item < 1) {
      throw ParseError(inter_file.string(), line_no, "user and item ids must be positive");
    }
    check_rating(r.rating, inter_file, line_no);
    dataset.interactions.push_back(r);
  }

  const fs::path item_file = dir / "items.jsonl";
  if (fs::exists(item_file)) {
    auto items = open_input(item_file);
    line_no = 0;
    while (std::getline(items, line)) {
      ++line_no;
      strip_cr(line);
      if (line.empty()) continue;
      // ordered_json keeps the attribute order as written.
      nlohmann::ordered_json obj;
      try {
        obj = nlohmann::ordered_json::parse(line);
      } catch (const nlohmann::ordered_json::exception& e) {
        throw ParseError(item_file.string(), line_no, e.what());
      }
      auto id = obj.find("item");
      if (!obj.is_object() || id == obj.end() || !id->is_number_integer() || id->get<ItemId>() < 1) {
        throw ParseError(item_file.string(), line_no, "expected {\"item\":int,\"attrs\":{...}}");
      }
      ItemRecord record{id->get<ItemId>(), {}};
      if (auto attrs = obj.find("attrs"); attrs != obj.end()) {
        if (!attrs->is_object()) throw ParseError(item_file.string(), line_no, "'attrs' must be an object");
        for (const auto& [k, v] : attrs->items()) {
          if (!v.is_string()) {
            throw ParseError(item_file.string(), line_no, "attribute '" + k + "' must be a string");
          }
          record.attributes.emplace_back(k, v.get<std::string>());
        }
      }
      dataset.catalog.push_back(std::move(record));
    }
  }
  finalize(dataset);
  return dataset;
}

}  // namespace

NormalizedDataset load_dataset(const std::filesystem::path& source, DatasetFormat format,
                               std::string name) {
  if (!fs::exists(source)) throw ParseError(source.string(), 0, "no such file or directory");
  switch (format) {
    case DatasetFormat::ml100k: return load_ml100k(source, std::move(name));
    case DatasetFormat::beauty: return load_beauty(source, std::move(name));
    case DatasetFormat::yelp: return load_yelp(source, std::move(name));
    case DatasetFormat::normalized: return load_normalized(source, std::move(name));
  }
  throw Error("unsupported dataset format");
}

}  // namespace recbench
