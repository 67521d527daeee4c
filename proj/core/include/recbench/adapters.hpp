#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "recbench/dataset.hpp"
#include "recbench/extraction.hpp"
#include "recbench/prompt.hpp"

namespace recbench {

enum class RunSource { llm, builtin, external };

RunSource parse_run_source(std::string_view text);
std::string_view to_string(RunSource source);

// Which slice of a user's history a model sees: all of it, or the n most recent items.
struct SequenceMode {
  int few_shot = 0;  // 0 = full history

  bool is_full() const { return few_shot == 0; }
  std::string label() const;  // "full" or "few_shot_<n>"
  friend bool operator==(const SequenceMode&, const SequenceMode&) = default;
};

SequenceMode parse_sequence_mode(std::string_view text);

// Most recent `mode.few_shot` items, order preserved; the whole history in full mode.
std::vector<ItemId> apply_sequence_mode(const std::vector<ItemId>& history, SequenceMode mode);

struct EndpointConfig {
  std::string model_name;
  std::string base_url;        // e.g. http://127.0.0.1:8080/v1
  std::string api_key_env;     // empty: send no Authorization header
  double temperature = 0.0;
  double timeout_seconds = 60.0;
  int max_retries = 3;
  int max_in_flight = 4;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds max_backoff{30000};
};

struct RecommendationRun {
  UserId user = 0;
  int run = 0;  // 1-based repetition index
  RunSource source = RunSource::llm;
  std::string model;
  std::string raw_text;         // LLM output; empty for other sources
  std::vector<RawId> items;     // unvalidated ids; empty for LLM runs before extraction
  double elapsed_seconds = 0.0;
  bool failed = false;
  std::string error;
};

// Canonical chat-completion request body for (cfg, prompt). Identical inputs give identical bytes.
std::string chat_request_body(const EndpointConfig& cfg, const RenderedPrompt& prompt);

// POSTs one chat completion. Transport errors, 429 and 5xx are retried with exponential backoff
// up to cfg.max_retries; the elapsed time of the successful attempt alone is recorded. Exhausted
// retries return a run with failed = true. Throws AuthError on 401/403 or a missing key variable.
RecommendationRun chat_complete(const EndpointConfig& cfg, const RenderedPrompt& prompt, int run);

enum class BuiltinKind { popularity, random };

BuiltinKind parse_builtin_kind(std::string_view text);
std::string_view to_string(BuiltinKind kind);

// Stable per-(seed, user, run) stream seed so random runs differ across repetitions yet replay.
std::uint64_t derive_seed(std::uint64_t seed, UserId user, int run);

// popularity: top-K by descending popularity, ties by ascending id.
// random: K distinct uniform draws from [1, universe_size], bit-identical per seed everywhere.
std::vector<ItemId> builtin_recommend(BuiltinKind kind, const ItemStatsMap& stats,
                                      ItemId universe_size, int k, std::uint64_t seed);

// --- exchange files --------------------------------------------------------------------------

// One `{"user","history","k","mode"}` line per user, ascending user id. Returns lines written.
std::size_t export_requests(const std::vector<UserSequence>& eval_set, int k, SequenceMode mode,
                            const std::filesystem::path& path);

struct ImportedRecommendations {
  std::vector<RecommendationRun> runs;  // file order
  std::vector<ExtractedList> lists;     // parallel to runs, validated against the universe
};

// Reads `{"user","run","items","elapsed_s","model"}` lines. Malformed lines report their line
// number; a repeated (user, run) pair is an error.
ImportedRecommendations import_recommendations(const std::filesystem::path& path,
                                               ItemId universe_size, int k);

// ExtractedList for any run: LLM runs are extracted from raw text, others validated as given.
ExtractedList to_extracted(const RecommendationRun& run, ItemId universe_size, int k);

}  // namespace recbench
