#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "recbench/dataset.hpp"

namespace recbench {

enum class PromptMode { general, augmented };

PromptMode parse_prompt_mode(std::string_view text);
std::string_view to_string(PromptMode mode);

struct PromptConfig {
  PromptMode mode = PromptMode::augmented;
  int recommendation_length = 5;
  std::string dataset_name;
};

struct RenderedPrompt {
  std::string text;
  UserId user = 0;
  std::vector<ItemId> items_referenced;
};

struct TemplateAsset {
  std::string_view name;  // e.g. "general_v1"
  std::string_view text;
};

// Embedded copies of core/templates/*.txt.
const TemplateAsset& template_for(PromptMode mode);
std::vector<TemplateAsset> all_templates();

// Replaces every `{Name}` with its value in one left-to-right pass; substituted text is never
// rescanned. Throws Error on a placeholder that has no value.
std::string substitute(std::string_view tmpl,
                       const std::vector<std::pair<std::string_view, std::string>>& values);

// "<id> (Title: t; Category: c; Rating: q)"; absent parts are dropped together with their labels.
std::string format_item_info(const ItemRecord& item, const ItemStats* stats);

RenderedPrompt render_prompt(const UserSequence& seq, const NormalizedDataset& dataset,
                             const ItemStatsMap& stats, const PromptConfig& cfg);

}  // namespace recbench
