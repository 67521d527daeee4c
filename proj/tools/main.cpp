// recbench: command-line front end for the sequential recommendation benchmark harness.
//
//   recbench ingest --format ml100k --in data/ml-100k --out data/ml-100k-normalized
//   recbench run --config bench.json
//   recbench report --run runs/ml100k --format md
//   recbench export-requests --run runs/ml100k --out requests.jsonl
//   recbench import-recs --run runs/ml100k --file recommendations.jsonl --model caser
//
// Exit codes: 0 success, 1 configuration or usage error, 2 runtime failure.

#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "recbench/artifacts.hpp"
#include "recbench/config.hpp"
#include "recbench/error.hpp"
#include "recbench/report.hpp"
#include "recbench/runner.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential recommendation benchmark harness"};
  app.require_subcommand(1);
  bool verbose = false;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");
  app.add_flag("-q,--quiet", quiet, "Warnings and errors only");

  std::string format, in_path, out_path, name;
  int min_interactions = 0;
  auto* ingest = app.add_subcommand("ingest", "Load a native dataset and write the normalized format");
  ingest->add_option("--format", format, "ml100k | beauty | yelp | normalized")->required();
  ingest->add_option("--in", in_path, "Source file or directory")->required();
  ingest->add_option("--out", out_path, "Output directory for interactions.jsonl / items.jsonl")->required();
  ingest->add_option("--name", name, "Dataset display name");
  ingest->add_option("--min-interactions", min_interactions, "Override the user filter threshold");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run a benchmark described by a config file");
  run->add_option("--config", config_path, "JSON run configuration")->required();

  std::string run_dir, report_format = "md";
  auto* report = app.add_subcommand("report", "Regenerate reports from a run directory");
  report->add_option("--run", run_dir, "Run directory")->required();
  report->add_option("--format", report_format, "md | csv");

  std::string mode = "full";
  auto* exporter = app.add_subcommand("export-requests", "Write exchange requests for external recommenders");
  exporter->add_option("--run", run_dir, "Run directory")->required();
  exporter->add_option("--out", out_path, "requests.jsonl to write")->required();
  exporter->add_option("--mode", mode, "full | few_shot_<n>");

  std::string file, model;
  auto* importer = app.add_subcommand("import-recs", "Import an external recommender's exchange responses");
  importer->add_option("--run", run_dir, "Run directory")->required();
  importer->add_option("--file", file, "recommendations.jsonl")->required();
  importer->add_option("--model", model, "Model name as written in the file")->required();
  importer->add_option("--mode", mode, "full | few_shot_<n>");

  auto* verify = app.add_subcommand("verify", "Check a run directory against its manifest");
  verify->add_option("--run", run_dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  spdlog::set_level(verbose ? spdlog::level::debug : quiet ? spdlog::level::warn : spdlog::level::info);
  spdlog::set_pattern("[%l] %v");

  try {
    if (*ingest) {
      const auto fmt = recbench::parse_dataset_format(format);
      recbench::DatasetSpec spec = recbench::default_spec(fmt);
      if (!name.empty()) spec.name = name;
      if (min_interactions > 0) spec.min_interactions = min_interactions;
      const auto s = recbench::ingest_to_normalized(fmt, in_path, out_path, spec);
      std::cout << spec.name << ": " << s.ratings << " ratings, " << s.users << " users, " << s.items
                << " items; after filtering (min " << spec.min_interactions << "): " << s.kept_ratings
                << " ratings, " << s.kept_users << " users, " << s.kept_items << " items\n";
    } else if (*run) {
      const auto cfg = recbench::load_config(config_path);
      const auto summary = recbench::run_benchmark(cfg);
      std::cout << recbench::render_markdown(summary.report);
      std::cout << "\nrun directory: " << summary.run_dir.string() << "\n";
    } else if (*report) {
      const recbench::ReportFormat formats[] = {recbench::parse_report_format(report_format)};
      const auto inputs = recbench::generate_reports(run_dir, formats);
      std::cout << (formats[0] == recbench::ReportFormat::markdown ? recbench::render_markdown(inputs)
                                                                   : recbench::render_csv(inputs));
    } else if (*exporter) {
      const auto n = recbench::export_requests_from_run(run_dir, out_path, recbench::parse_sequence_mode(mode));
      std::cout << "wrote " << n << " requests to " << out_path << "\n";
    } else if (*importer) {
      const auto n = recbench::import_recs_into_run(run_dir, file, model, recbench::parse_sequence_mode(mode));
      std::cout << "imported " << n << " runs for " << model << "\n";
    } else if (*verify) {
      const auto bad = recbench::verify_manifest(run_dir);
      for (const auto& path : bad) std::cout << "mismatch: " << path << "\n";
      if (!bad.empty()) return kExitRuntime;
      std::cout << "manifest ok\n";
    }
  } catch (const recbench::ConfigError& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitRuntime;
  }
  return 0;
}
