#pragma once

#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "recbench/extraction.hpp"
#include "support/fixtures.hpp"

namespace testing_support {

struct CorpusCase {
  std::string name;
  std::string text;
  long long universe = 1682;
  int k = 5;
  std::vector<long long> items;
  std::vector<long long> hallucinated;
  std::size_t truncated_from = 0;
};

inline std::vector<CorpusCase> load_corpus(const std::filesystem::path& path) {
  const auto doc = nlohmann::json::parse(read_text(path));
  std::vector<CorpusCase> cases;
  for (const auto& c : doc) {
    CorpusCase cc;
    cc.name = c.at("name").get<std::string>();
    cc.text = c.at("text").get<std::string>();
    cc.universe = c.value("universe", 1682LL);
    cc.k = c.value("k", 5);
    cc.items = c.at("items").get<std::vector<long long>>();
    cc.hallucinated = c.at("hallucinated").get<std::vector<long long>>();
    cc.truncated_from = c.at("truncated_from").get<std::size_t>();
    cases.push_back(std::move(cc));
  }
  return cases;
}

// Names of cases whose extraction differs from the expected lists.
inline std::vector<std::string> corpus_mismatches(const std::vector<CorpusCase>& cases) {
  std::vector<std::string> bad;
  for (const auto& c : cases) {
    const auto got = recbench::extract_and_validate(c.text, c.universe, c.k);
    const std::vector<long long> items(got.items.begin(), got.items.end());
    const std::vector<long long> hall(got.hallucinated.begin(), got.hallucinated.end());
    if (items != c.items || hall != c.hallucinated || got.truncated_from != c.truncated_from) {
      bad.push_back(c.name);
    }
  }
  return bad;
}

// Random text biased toward the shapes model output takes: digit runs, separators, list
// markers, line breaks, multi-byte characters.
inline std::string random_output(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {
      "0", "1", "7", "42", "1682", "1683", "99999999999999999999", "-", ".", ",", ", ", ";",
      " ", "\n", "\r\n", "\t", "1. ", "2. ", "3) ", "item", "ID", "(", ")", "[", "]", "é", "，", "#"};
  std::string out;
  const int n = static_cast<int>(rng() % 40);
  for (int i = 0; i < n; ++i) {
    if (rng() % 5 == 0) {
      out.push_back(static_cast<char>(rng() % 256));
    } else {
      out += pieces[rng() % pieces.size()];
    }
  }
  return out;
}

struct FuzzResult {
  std::size_t strings = 0;
  std::size_t violations = 0;
};

// Every extracted list must be distinct ids in [1, universe], at most K long, disjoint from
// the hallucinated list.
inline FuzzResult fuzz_extraction(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FuzzResult r;
  for (std::size_t i = 0; i < count; ++i) {
    const std::string text = random_output(rng);
    const long long universe = 1 + static_cast<long long>(rng() % 2000);
    const int k = 1 + static_cast<int>(rng() % 10);
    const auto got = recbench::extract_and_validate(text, universe, k);
    ++r.strings;
    bool ok = got.items.size() <= static_cast<std::size_t>(k);
    std::set<long long> seen;
    for (auto id : got.items) {
      if (id < 1 || id > universe || !seen.insert(id).second) ok = false;
    }
    for (auto id : got.hallucinated) {
      if (seen.count(id) || (id >= 1 && id <= universe)) ok = false;
    }
    if (!ok) ++r.violations;
  }
  return r;
}

}  // namespace testing_support
