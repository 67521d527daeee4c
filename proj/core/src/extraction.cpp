#include "recbench/extraction.hpp"

#include <limits>
#include <unordered_set>

namespace recbench {
namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

struct Marker {
  std::size_t begin = 0;  // offset of the first enumerator digit
  std::size_t end = 0;    // one past the last enumerator digit
  RawId value = 0;
};

RawId parse_run(std::string_view digits) {
  constexpr RawId kMax = std::numeric_limits<RawId>::max();
  RawId value = 0;
  for (char c : digits) {
    const RawId d = static_cast<RawId>(c - '0');
    if (value > (kMax - d) / 10) return kMax;
    value = value * 10 + d;
  }
  return value;
}

// `<n>.` or `<n>)` at line start (after indentation), followed by whitespace or end of line.
std::vector<Marker> enumeration_markers(std::string_view text) {
  std::vector<Marker> markers;
  std::size_t line_start = 0;
  while (line_start <= text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    std::size_t i = line_start;
    while (i < line_end && is_blank(text[i])) ++i;
    const std::size_t digits_begin = i;
    while (i < line_end && is_digit(text[i])) ++i;
    if (i > digits_begin && i < line_end && (text[i] == '.' || text[i] == ')') &&
        (i + 1 == line_end || is_blank(text[i + 1]))) {
      markers.push_back({digits_begin, i, parse_run(text.substr(digits_begin, i - digits_begin))});
    }
    if (line_end == text.size()) break;
    line_start = line_end + 1;
  }
  return markers;
}

bool markers_count_up(const std::vector<Marker>& markers) {
  if (markers.size() < 2) return false;
  for (std::size_t i = 0; i < markers.size(); ++i) {
    if (markers[i].value != static_cast<RawId>(i + 1)) return false;
  }
  return true;
}

}  // namespace

bool is_numbered_list(std::string_view text) { return markers_count_up(enumeration_markers(text)); }

std::vector<RawId> scan_integers(std::string_view text) {
  std::vector<Marker> markers = enumeration_markers(text);
  if (!markers_count_up(markers)) markers.clear();

  std::vector<RawId> out;
  std::size_t next_marker = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_digit(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_digit(text[j])) ++j;
    if (next_marker < markers.size() && markers[next_marker].begin == i) {
      ++next_marker;
    } else {
      out.push_back(parse_run(text.substr(i, j - i)));
    }
    i = j;
  }
  return out;
}

ExtractedList validate_ids(std::span<const RawId> candidates, ItemId universe_size, int k,
                           UserId user, int run) {
  ExtractedList out;
  out.user = user;
  out.run = run;
  std::unordered_set<RawId> seen;
  std::vector<ItemId> valid;
  for (RawId id : candidates) {
    if (!seen.insert(id).second) continue;
    if (id >= 1 && id <= universe_size) {
      valid.push_back(id);
    } else {
      out.hallucinated.push_back(id);
    }
  }
  out.truncated_from = valid.size();
  if (k >= 0 && valid.size() > static_cast<std::size_t>(k)) valid.resize(static_cast<std::size_t>(k));
  out.items = std::move(valid);
  return out;
}

ExtractedList extract_and_validate(std::string_view raw_text, ItemId universe_size, int k,
                                   UserId user, int run) {
  const auto ids = scan_integers(raw_text);
  return validate_ids(ids, universe_size, k, user, run);
}

HallucinationStats hallucination_rate(std::span<const ExtractedList> lists) {
  HallucinationStats stats;
  for (const auto& list : lists) {
    stats.invalid_count += list.hallucinated.size();
    stats.total_predicted += list.items.size() + list.hallucinated.size();
  }
  if (stats.total_predicted > 0) {
    stats.rate = static_cast<double>(stats.invalid_count) / static_cast<double>(stats.total_predicted);
  }
  return stats;
}

}  // namespace recbench
