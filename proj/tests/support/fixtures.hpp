#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace testing_support {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("recbench_test_" + std::to_string(stamp) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Interaction {
  long long user, item;
  double rating;
  long long ts;
};

struct ItemAttrs {
  long long item;
  std::vector<std::pair<std::string, std::string>> attrs;
};

inline void write_normalized_files(const std::filesystem::path& dir,
                                   const std::vector<Interaction>& interactions,
                                   const std::vector<ItemAttrs>& items) {
  std::string inter;
  for (const auto& r : interactions) {
    nlohmann::ordered_json line = {{"user", r.user}, {"item", r.item}, {"rating", r.rating}, {"ts", r.ts}};
    inter += line.dump() + "\n";
  }
  write_text(dir / "interactions.jsonl", inter);
  std::string cat;
  for (const auto& it : items) {
    nlohmann::ordered_json attrs = nlohmann::ordered_json::object();
    for (const auto& [k, v] : it.attrs) attrs[k] = v;
    nlohmann::ordered_json line = {{"item", it.item}, {"attrs", attrs}};
    cat += line.dump() + "\n";
  }
  write_text(dir / "items.jsonl", cat);
}

}  // namespace testing_support
