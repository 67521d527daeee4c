#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "recbench/dataset.hpp"

namespace recbench {

// An integer as read from model output or an exchange file. Digit runs too long for 64 bits
// saturate to INT64_MAX.
using RawId = std::int64_t;

struct ExtractedList {
  UserId user = 0;
  int run = 0;
  std::vector<ItemId> items;         // valid, distinct, at most K
  std::vector<RawId> hallucinated;   // out-of-universe, distinct, in scan order
  std::size_t truncated_from = 0;    // valid count before truncation to K

  friend bool operator==(const ExtractedList&, const ExtractedList&) = default;
};

struct HallucinationStats {
  std::size_t invalid_count = 0;
  std::size_t total_predicted = 0;
  double rate = 0.0;
};

// True when the text is a line-structured enumeration: at least two lines start with `<n>.` or
// `<n>)` followed by whitespace, and those markers count 1, 2, 3, ... in order.
bool is_numbered_list(std::string_view text);

// Maximal decimal-digit runs, left to right, with enumeration markers removed when
// is_numbered_list(text) holds.
std::vector<RawId> scan_integers(std::string_view text);

// Dedupe (first occurrence wins), range-check against [1, universe_size], then keep the first K.
ExtractedList validate_ids(std::span<const RawId> candidates, ItemId universe_size, int k,
                           UserId user = 0, int run = 0);

ExtractedList extract_and_validate(std::string_view raw_text, ItemId universe_size, int k,
                                   UserId user = 0, int run = 0);

HallucinationStats hallucination_rate(std::span<const ExtractedList> lists);

}  // namespace recbench
