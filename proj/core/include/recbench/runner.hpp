#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>

#include "recbench/config.hpp"
#include "recbench/report.hpp"

namespace recbench {

struct RunSummary {
  std::filesystem::path run_dir;
  ReportInputs report;
  std::size_t prompt_renders = 0;  // LLM prompts rendered in this invocation
  std::size_t requests_sent = 0;   // chat completions attempted in this invocation
  std::size_t resumed = 0;         // (user, run) pairs reused from a previous invocation
};

// ingest -> eval set -> adapters -> extraction -> metrics -> reports, all persisted under
// cfg.output_dir. Re-running over an existing directory skips (user, run) pairs that already
// have a successful response.
RunSummary run_benchmark(const RunConfig& cfg);

// Recomputes extracted lists, per-user metrics, reports and the manifest purely from the
// persisted artifacts of a run directory.
ReportInputs generate_reports(const std::filesystem::path& run_dir, std::span<const ReportFormat> formats);

std::size_t export_requests_from_run(const std::filesystem::path& run_dir, const std::filesystem::path& out,
                                     SequenceMode mode);

// Adds an external model's exchange responses (lines whose "model" equals `model`) to a run and
// regenerates its reports. Returns the number of runs imported.
std::size_t import_recs_into_run(const std::filesystem::path& run_dir, const std::filesystem::path& file,
                                 const std::string& model, SequenceMode mode);

struct IngestSummary {
  std::size_t ratings = 0, users = 0, items = 0;                 // before filtering
  std::size_t kept_ratings = 0, kept_users = 0, kept_items = 0;  // after filtering
};

// Loads a native dataset, filters users and writes the normalized interchange files to `out`.
IngestSummary ingest_to_normalized(DatasetFormat format, const std::filesystem::path& in,
                                   const std::filesystem::path& out, const DatasetSpec& spec);

}  // namespace recbench
