#include "recbench/prompt.hpp"

#include <cmath>
#include <cstdio>

#include "recbench/error.hpp"

namespace recbench {

PromptMode parse_prompt_mode(std::string_view text) {
  if (text == "general") return PromptMode::general;
  if (text == "augmented") return PromptMode::augmented;
  throw ConfigError("unknown prompt mode '" + std::string(text) + "' (expected general or augmented)");
}

std::string_view to_string(PromptMode mode) {
  return mode == PromptMode::general ? "general" : "augmented";
}

std::string substitute(std::string_view tmpl,
                       const std::vector<std::pair<std::string_view, std::string>>& values) {
  std::string out;
  out.reserve(tmpl.size() + 256);
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find('{', pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    const auto close = tmpl.find('}', open);
    if (close == std::string_view::npos) throw Error("unterminated placeholder in template");
    out.append(tmpl.substr(pos, open - pos));
    const auto key = tmpl.substr(open + 1, close - open - 1);
    bool found = false;
    for (const auto& [name, value] : values) {
      if (name == key) {
        out.append(value);
        found = true;
        break;
      }
    }
    if (!found) throw Error("no value for placeholder {" + std::string(key) + "}");
    pos = close + 1;
  }
  return out;
}

namespace {

// Keeps fragment delimiters and template braces unambiguous inside attribute values.
std::string sanitize(std::string_view value) {
  std::string out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    const char c = value[i];
    if (c == ';' && i + 1 < value.size() && value[i + 1] == ' ') {
      out.push_back(',');
      ++i;
    } else if (c == '{') {
      out.push_back('(');
    } else if (c == '}') {
      out.push_back(')');
    } else if (c == '\n' || c == '\r' || c == '\t') {
      out.push_back(' ');
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string join_ids(const std::vector<ItemId>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(ids[i]);
  }
  return out;
}

}  // namespace

std::string format_item_info(const ItemRecord& item, const ItemStats* stats) {
  std::vector<std::string> parts;
  std::string_view title = item.attribute("Title");
  if (title.empty()) title = item.attribute("Name");
  if (!title.empty()) parts.push_back("Title: " + sanitize(title));
  if (auto category = item.attribute("Category"); !category.empty()) {
    parts.push_back("Category: " + sanitize(category));
  }
  if (stats && stats->quality && std::isfinite(*stats->quality)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", *stats->quality);
    parts.push_back(std::string("Rating: ") + buf);
  }

  std::string out = std::to_string(item.id);
  if (parts.empty()) return out;
  out += " (";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += "; ";
    out += parts[i];
  }
  out += ")";
  return out;
}

RenderedPrompt render_prompt(const UserSequence& seq, const NormalizedDataset& dataset,
                             const ItemStatsMap& stats, const PromptConfig& cfg) {
  if (seq.history.empty()) throw Error("empty interaction sequence");
  if (cfg.recommendation_length < 1) throw ConfigError("recommendation length must be >= 1");

  RenderedPrompt prompt;
  prompt.user = seq.user;
  prompt.items_referenced = seq.history;
  const std::string k = std::to_string(cfg.recommendation_length);

  if (cfg.mode == PromptMode::general) {
    prompt.text = substitute(template_for(PromptMode::general).text,
                             {{"Interaction_sequence", join_ids(seq.history)},
                              {"Recommendation_length", k}});
    return prompt;
  }

  std::string enriched;
  for (std::size_t i = 0; i < seq.history.size(); ++i) {
    const ItemId id = seq.history[i];
    const ItemRecord* record = dataset.find_item(id);
    const ItemRecord fallback{id, {}};
    auto st = stats.find(id);
    if (i) enriched += ", ";
    enriched += format_item_info(record ? *record : fallback, st == stats.end() ? nullptr : &st->second);
  }
  prompt.text = substitute(template_for(PromptMode::augmented).text,
                           {{"Dataset_name", sanitize(cfg.dataset_name)},
                            {"User_id", std::to_string(seq.user)},
                            {"Interaction_sequence_with_item_info", enriched},
                            {"Recommendation_length", k},
                            {"Total_num_of_items", std::to_string(dataset.universe_size)}});
  return prompt;
}

}  // namespace recbench
