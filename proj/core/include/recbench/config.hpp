#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "recbench/adapters.hpp"
#include "recbench/dataset.hpp"
#include "recbench/metrics.hpp"
#include "recbench/prompt.hpp"

namespace recbench {

struct DatasetConfig {
  DatasetFormat format = DatasetFormat::normalized;
  std::filesystem::path path;  // resolved against the config file's directory
  DatasetSpec spec;
};

struct ModelConfig {
  std::string name;
  RunSource source = RunSource::builtin;
  EndpointConfig endpoint;                    // llm
  PromptMode prompt_mode = PromptMode::augmented;  // llm
  BuiltinKind builtin = BuiltinKind::popularity;   // builtin
  std::filesystem::path file;                 // external: recommendations.jsonl
  SequenceMode external_mode;                 // external: which mode the file answers
};

struct RunConfig {
  DatasetConfig dataset;
  std::vector<ModelConfig> models;
  EvalConfig eval;
  PromptConfig prompt;
  std::vector<SequenceMode> sequence_modes{SequenceMode{}};
  std::uint64_t seed = 42;
  std::filesystem::path output_dir;
  bool rank_few_shot = false;
};

// Parses a JSON run configuration (comments allowed), rejecting unknown keys and applying
// defaults: K = 5, T = 10, temperature 0, split 0.9 and the per-dataset min/max lengths.
// Relative paths resolve against `base_dir`. Throws ConfigError.
RunConfig validate_config(std::string_view text, const std::filesystem::path& base_dir = {});

RunConfig load_config(const std::filesystem::path& path);

// Fully resolved configuration, every default spelled out. Never contains API keys.
std::string config_snapshot(const RunConfig& cfg);

}  // namespace recbench
