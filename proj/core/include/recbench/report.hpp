#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "recbench/adapters.hpp"
#include "recbench/extraction.hpp"
#include "recbench/metrics.hpp"

namespace recbench {

enum class Metric { recall, ndcg, arp, arq, arqv, arr, art };
inline constexpr std::array<Metric, 7> kMetrics = {Metric::recall, Metric::ndcg, Metric::arp,
                                                   Metric::arq,    Metric::arqv, Metric::arr,
                                                   Metric::art};

enum class Dimension { accuracy, fairness, stability, efficiency };
inline constexpr std::array<Dimension, 4> kDimensions = {Dimension::accuracy, Dimension::fairness,
                                                         Dimension::stability, Dimension::efficiency};

enum class Direction { higher_better, lower_better };
using MetricDirections = std::array<Direction, kMetrics.size()>;

// recall, ndcg, arq, arr: higher is better; arp, arqv, art: lower is better.
MetricDirections default_directions();
Dimension dimension_of(Metric metric);
std::string_view dimension_name(Dimension dimension);
// Column heading, e.g. "Recall@5" or "ART(s)".
std::string metric_heading(Metric metric, int k);
std::string_view metric_key(Metric metric);  // "recall", "ndcg", ...
double metric_value(const MetricReport& report, Metric metric);

struct RankingScore {
  std::vector<std::string> models;
  std::vector<std::array<double, kMetrics.size()>> per_metric;     // parallel to models
  std::vector<std::array<double, kDimensions.size()>> per_dimension;
  std::vector<double> overall;
};

// Per metric the best of M models scores M and the worst 1; exact ties share the mean of the
// ranks they occupy. Throws Error with fewer than two models or a non-finite metric value.
RankingScore rank_scores(const std::vector<std::pair<std::string, MetricReport>>& reports,
                         const MetricDirections& directions = default_directions());

// Decimal rendering rounded half-to-even on the shortest round-trip representation, so 0.31415
// renders as "0.3142" even though its binary value is slightly below the midpoint.
std::string format_fixed(double value, int decimals = 4);

// Shortest string that parses back to the same double ("nan" for NaN).
std::string format_full(double value);

struct ReportRow {
  std::string model;
  SequenceMode mode;
  MetricReport metrics;
  HallucinationStats hallucination;
  std::size_t executions = 0;  // runs attempted
  std::size_t successes = 0;   // runs with a non-empty valid list

  std::string label() const;  // "GPT-4.1" or "GPT-4.1 (few-shot-5)"
};

struct ReportInputs {
  std::string dataset_name;
  int k = 5;
  int repetitions = 10;
  std::vector<ReportRow> rows;
  std::optional<RankingScore> scores;
};

std::string render_markdown(const ReportInputs& inputs);
std::string render_csv(const ReportInputs& inputs);
std::string render_overall_scores_csv(const ReportInputs& inputs);
std::string render_hallucination_csv(const ReportInputs& inputs);
std::string render_per_user_csv(const std::vector<UserMetrics>& rows);

enum class ReportFormat { markdown, csv };
ReportFormat parse_report_format(std::string_view text);

// Writes report.md or report.csv plus overall_scores.csv and hallucination.csv into `dir`.
// Returns the relative names written.
std::vector<std::string> emit_report(const ReportInputs& inputs, std::span<const ReportFormat> formats,
                                     const std::filesystem::path& dir);

}  // namespace recbench
