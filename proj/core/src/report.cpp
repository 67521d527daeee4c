#include "recbench/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "recbench/artifacts.hpp"
#include "recbench/error.hpp"

namespace recbench {

MetricDirections default_directions() {
  return {Direction::higher_better, Direction::higher_better, Direction::lower_better,
          Direction::higher_better, Direction::lower_better,  Direction::higher_better,
          Direction::lower_better};
}

Dimension dimension_of(Metric metric) {
  switch (metric) {
    case Metric::recall:
    case Metric::ndcg: return Dimension::accuracy;
    case Metric::arp:
    case Metric::arq: return Dimension::fairness;
    case Metric::arqv:
    case Metric::arr: return Dimension::stability;
    case Metric::art: return Dimension::efficiency;
  }
  return Dimension::efficiency;
}

std::string_view dimension_name(Dimension dimension) {
  switch (dimension) {
    case Dimension::accuracy: return "Accuracy";
    case Dimension::fairness: return "Fairness";
    case Dimension::stability: return "Stability";
    case Dimension::efficiency: return "Efficiency";
  }
  return "";
}

std::string metric_heading(Metric metric, int k) {
  switch (metric) {
    case Metric::recall: return "Recall@" + std::to_string(k);
    case Metric::ndcg: return "NDCG@" + std::to_string(k);
    case Metric::arp: return "ARP";
    case Metric::arq: return "ARQ";
    case Metric::arqv: return "ARQV";
    case Metric::arr: return "ARR";
    case Metric::art: return "ART(s)";
  }
  return "";
}

std::string_view metric_key(Metric metric) {
  switch (metric) {
    case Metric::recall: return "recall";
    case Metric::ndcg: return "ndcg";
    case Metric::arp: return "arp";
    case Metric::arq: return "arq";
    case Metric::arqv: return "arqv";
    case Metric::arr: return "arr";
    case Metric::art: return "art";
  }
  return "";
}

double metric_value(const MetricReport& report, Metric metric) {
  switch (metric) {
    case Metric::recall: return report.recall_at_k;
    case Metric::ndcg: return report.ndcg_at_k;
    case Metric::arp: return report.arp;
    case Metric::arq: return report.arq;
    case Metric::arqv: return report.arqv;
    case Metric::arr: return report.arr;
    case Metric::art: return report.art_seconds;
  }
  return 0.0;
}

RankingScore rank_scores(const std::vector<std::pair<std::string, MetricReport>>& reports,
                         const MetricDirections& directions) {
  const std::size_t m = reports.size();
  if (m < 2) throw Error("ranking needs at least two models");

  RankingScore scores;
  scores.per_metric.resize(m);
  scores.per_dimension.assign(m, {});
  scores.overall.assign(m, 0.0);
  for (const auto& [name, report] : reports) scores.models.push_back(name);

  for (std::size_t mi = 0; mi < kMetrics.size(); ++mi) {
    const Metric metric = kMetrics[mi];
    std::vector<double> adjusted(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double v = metric_value(reports[i].second, metric);
      if (!std::isfinite(v)) {
        throw Error("model '" + reports[i].first + "' has no value for " + std::string(metric_key(metric)));
      }
      adjusted[i] = directions[mi] == Direction::higher_better ? v : -v;
    }
    // Worst first: position p (0-based) earns score p + 1.
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return adjusted[a] < adjusted[b]; });
    for (std::size_t p = 0; p < m;) {
      std::size_t q = p;
      while (q + 1 < m && adjusted[order[q + 1]] == adjusted[order[p]]) ++q;
      const double shared = (static_cast<double>(p + 1) + static_cast<double>(q + 1)) / 2.0;
      for (std::size_t t = p; t <= q; ++t) scores.per_metric[order[t]][mi] = shared;
      p = q + 1;
    }
  }

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t mi = 0; mi < kMetrics.size(); ++mi) {
      const auto d = static_cast<std::size_t>(dimension_of(kMetrics[mi]));
      scores.per_dimension[i][d] += scores.per_metric[i][mi];
    }
    for (double d : scores.per_dimension[i]) scores.overall[i] += d;
  }
  return scores;
}

std::string format_full(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string format_fixed(double value, int decimals) {
  if (std::isnan(value)) return "n/a";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";

  // Shortest scientific form: d.ddddde[+-]xx
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, std::fabs(value), std::chars_format::scientific);
  const std::string sci(buf, ptr);
  const auto e_pos = sci.find('e');
  std::string mantissa;
  for (char c : sci.substr(0, e_pos)) {
    if (c != '.') mantissa.push_back(c);
  }
  const int exponent = std::stoi(sci.substr(e_pos + 1));

  // digits[i] has place value 10^(int_digits - 1 - i).
  int int_digits = exponent + 1;
  std::string digits = mantissa;
  if (int_digits <= 0) {
    digits.insert(0, static_cast<std::size_t>(1 - int_digits), '0');
    int_digits = 1;
  }
  const auto keep = static_cast<std::size_t>(int_digits + decimals);
  if (digits.size() < keep) digits.append(keep - digits.size(), '0');

  std::string kept = digits.substr(0, keep);
  const std::string dropped = digits.substr(keep);
  bool round_up = false;
  if (!dropped.empty()) {
    const char first = dropped[0];
    const bool rest_nonzero = dropped.find_first_not_of('0', 1) != std::string::npos;
    if (first > '5' || (first == '5' && rest_nonzero)) {
      round_up = true;
    } else if (first == '5') {
      round_up = (kept.back() - '0') % 2 == 1;
    }
  }
  if (round_up) {
    int i = static_cast<int>(kept.size()) - 1;
    while (i >= 0 && kept[static_cast<std::size_t>(i)] == '9') kept[static_cast<std::size_t>(i--)] = '0';
    if (i < 0) {
      kept.insert(kept.begin(), '1');
      ++int_digits;
    } else {
      ++kept[static_cast<std::size_t>(i)];
    }
  }

  std::string out = kept.substr(0, static_cast<std::size_t>(int_digits));
  out.erase(0, std::min(out.find_first_not_of('0'), out.size() - 1));
  if (decimals > 0) out += "." + kept.substr(static_cast<std::size_t>(int_digits));
  const bool all_zero = kept.find_first_not_of('0') == std::string::npos;
  if (value < 0 && !all_zero) out.insert(out.begin(), '-');
  return out;
}

std::string ReportRow::label() const {
  if (mode.is_full()) return model;
  return model + " (few-shot-" + std::to_string(mode.few_shot) + ")";
}

namespace {

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string md_cell(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

std::string format_score(double score) {
  // Scores are integers or halves.
  if (score == std::floor(score)) return std::to_string(static_cast<long long>(score));
  return format_fixed(score, 1);
}

}  // namespace

std::string render_markdown(const ReportInputs& in) {
  std::string out;
  out += "# Sequential recommendation benchmark: " + in.dataset_name + "\n\n";
  out += "K = " + std::to_string(in.k) + ", T = " + std::to_string(in.repetitions) + "\n\n";

  out += "## Multi-dimensional performance\n\n| Model |";
  for (Metric m : kMetrics) {
    out += " " + std::string(dimension_name(dimension_of(m))) + ": " + metric_heading(m, in.k) + " |";
  }
  out += "\n|:--|";
  for (std::size_t i = 0; i < kMetrics.size(); ++i) out += "--:|";
  out += "\n";
  for (const auto& row : in.rows) {
    out += "| " + md_cell(row.label()) + " |";
    for (Metric m : kMetrics) out += " " + format_fixed(metric_value(row.metrics, m)) + " |";
    out += "\n";
  }

  if (in.scores) {
    const auto& s = *in.scores;
    out += "\n## Ranking scores\n\n| Model |";
    for (Dimension d : kDimensions) out += " " + std::string(dimension_name(d)) + " |";
    out += " Overall |\n|:--|";
    for (std::size_t i = 0; i <= kDimensions.size(); ++i) out += "--:|";
    out += "\n";
    for (std::size_t i = 0; i < s.models.size(); ++i) {
      out += "| " + md_cell(s.models[i]) + " |";
      for (double d : s.per_dimension[i]) out += " " + format_score(d) + " |";
      out += " " + format_score(s.overall[i]) + " |\n";
    }
  }

  out += "\n## Successful executions\n\n| Model | Successful | Total | Users |\n|:--|--:|--:|--:|\n";
  for (const auto& row : in.rows) {
    out += "| " + md_cell(row.label()) + " | " + std::to_string(row.successes) + " | " +
           std::to_string(row.executions) + " | " + std::to_string(row.metrics.num_users) + " |\n";
  }

  out += "\n## Hallucination rates\n\n| Model | Invalid | Predicted | Rate |\n|:--|--:|--:|--:|\n";
  for (const auto& row : in.rows) {
    out += "| " + md_cell(row.label()) + " | " + std::to_string(row.hallucination.invalid_count) + " | " +
           std::to_string(row.hallucination.total_predicted) + " | " +
           format_fixed(row.hallucination.rate) + " |\n";
  }
  return out;
}

std::string render_csv(const ReportInputs& in) {
  std::string out = "model,mode";
  for (Metric m : kMetrics) out += "," + csv_field(metric_heading(m, in.k));
  out += ",users,executions,successes,failures,quality_skips\n";
  for (const auto& row : in.rows) {
    out += csv_field(row.model) + "," + row.mode.label();
    for (Metric m : kMetrics) out += "," + format_full(metric_value(row.metrics, m));
    out += "," + std::to_string(row.metrics.num_users) + "," + std::to_string(row.executions) + "," +
           std::to_string(row.successes) + "," + std::to_string(row.metrics.failures) + "," +
           std::to_string(row.metrics.quality_skips) + "\n";
  }
  return out;
}

std::string render_overall_scores_csv(const ReportInputs& in) {
  std::string out = "model";
  for (Metric m : kMetrics) out += "," + std::string(metric_key(m));
  for (Dimension d : kDimensions) {
    std::string name(dimension_name(d));
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
    out += "," + name;
  }
  out += ",overall\n";
  if (!in.scores) return out;
  const auto& s = *in.scores;
  for (std::size_t i = 0; i < s.models.size(); ++i) {
    out += csv_field(s.models[i]);
    for (double v : s.per_metric[i]) out += "," + format_full(v);
    for (double v : s.per_dimension[i]) out += "," + format_full(v);
    out += "," + format_full(s.overall[i]) + "\n";
  }
  return out;
}

std::string render_hallucination_csv(const ReportInputs& in) {
  std::string out = "model,invalid,total_predicted,rate\n";
  for (const auto& row : in.rows) {
    out += csv_field(row.label()) + "," + std::to_string(row.hallucination.invalid_count) + "," +
           std::to_string(row.hallucination.total_predicted) + "," + format_full(row.hallucination.rate) +
           "\n";
  }
  return out;
}

std::string render_per_user_csv(const std::vector<UserMetrics>& rows) {
  std::string out = "user_id,recall,ndcg,arp,arq,arqv,arr\n";
  auto cell = [](const std::optional<double>& v) { return v ? format_full(*v) : std::string(); };
  for (const auto& r : rows) {
    out += std::to_string(r.user) + "," + cell(r.recall) + "," + cell(r.ndcg) + "," + cell(r.arp) + "," +
           cell(r.arq) + "," + cell(r.arqv) + "," + cell(r.arr) + "\n";
  }
  return out;
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "md" || text == "markdown") return ReportFormat::markdown;
  if (text == "csv") return ReportFormat::csv;
  throw ConfigError("unknown report format '" + std::string(text) + "' (expected md or csv)");
}

std::vector<std::string> emit_report(const ReportInputs& inputs, std::span<const ReportFormat> formats,
                                     const std::filesystem::path& dir) {
  if (inputs.rows.empty()) throw Error("no model results to report");
  std::vector<std::string> written;
  for (ReportFormat f : formats) {
    if (f == ReportFormat::markdown) {
      write_file_atomic(dir / "report.md", render_markdown(inputs));
      written.push_back("report.md");
    } else {
      write_file_atomic(dir / "report.csv", render_csv(inputs));
      written.push_back("report.csv");
    }
  }
  write_file_atomic(dir / "overall_scores.csv", render_overall_scores_csv(inputs));
  write_file_atomic(dir / "hallucination.csv", render_hallucination_csv(inputs));
  written.push_back("overall_scores.csv");
  written.push_back("hallucination.csv");
  return written;
}

}  // namespace recbench
