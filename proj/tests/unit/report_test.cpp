#include <gtest/gtest.h>

#include "recbench/artifacts.hpp"
#include "recbench/error.hpp"
#include "recbench/report.hpp"
#include "support/fixtures.hpp"
#include "support/ranking_checks.hpp"

using namespace recbench;
using testing_support::report_with;
using testing_support::TempDir;

namespace {

std::vector<std::pair<std::string, MetricReport>> pool(const std::vector<double>& recall,
                                                       const std::vector<double>& art) {
  std::vector<std::pair<std::string, MetricReport>> out;
  for (std::size_t i = 0; i < recall.size(); ++i) {
    out.emplace_back("m" + std::to_string(i), report_with({recall[i], 0.1, 1, 1, 1, 1, art[i]}));
  }
  return out;
}

std::size_t index_of(Metric m) {
  for (std::size_t i = 0; i < kMetrics.size(); ++i)
    if (kMetrics[i] == m) return i;
  return 0;
}

ReportInputs sample_inputs() {
  ReportInputs in;
  in.dataset_name = "ML-100K";
  in.k = 5;
  in.repetitions = 10;
  ReportRow a;
  a.model = "GPT-4.1";
  a.metrics = report_with({0.31415, 0.2, 100.5, 3.9, 0.4, 0.8152, 1.25});
  a.metrics.num_users = 943;
  a.executions = 9430;
  a.successes = 9400;
  a.hallucination = {3, 100, 0.03};
  ReportRow b = a;
  b.mode = SequenceMode{5};
  b.metrics.recall_at_k = 0.1;
  ReportRow c = a;
  c.model = "Pop";
  c.metrics.recall_at_k = 0.02;
  in.rows = {a, b, c};
  in.scores = rank_scores({{"GPT-4.1", a.metrics}, {"Pop", c.metrics}});
  return in;
}

}  // namespace

TEST(Ranking, HigherBetterOrdering) {
  const auto s = rank_scores(pool({0.5, 0.2, 0.9}, {1, 2, 3}));
  const auto r = index_of(Metric::recall);
  EXPECT_EQ(s.per_metric[0][r], 2);
  EXPECT_EQ(s.per_metric[1][r], 1);
  EXPECT_EQ(s.per_metric[2][r], 3);
}

TEST(Ranking, TiesShareMeanRank) {
  const auto s = rank_scores(pool({1, 2, 3}, {1.0, 1.0, 2.0}));
  const auto a = index_of(Metric::art);
  EXPECT_EQ(s.per_metric[0][a], 2.5);
  EXPECT_EQ(s.per_metric[1][a], 2.5);
  EXPECT_EQ(s.per_metric[2][a], 1);
}

TEST(Ranking, ThirteenModelsBestScoresThirteen) {
  std::vector<double> recall, art;
  for (int i = 0; i < 13; ++i) {
    recall.push_back(0.01 * i);
    art.push_back(i);
  }
  const auto s = rank_scores(pool(recall, art));
  EXPECT_EQ(s.per_metric[12][index_of(Metric::recall)], 13);
  EXPECT_EQ(s.per_metric[0][index_of(Metric::art)], 13);
  EXPECT_EQ(s.per_metric[0][index_of(Metric::recall)], 1);
}

TEST(Ranking, DimensionsSumMembersAndOverallSumsDimensions) {
  const auto s = rank_scores(pool({0.5, 0.2, 0.9}, {3, 1, 2}));
  for (std::size_t i = 0; i < 3; ++i) {
    double total = 0;
    for (std::size_t mi = 0; mi < kMetrics.size(); ++mi) total += s.per_metric[i][mi];
    EXPECT_EQ(s.overall[i], total);
    EXPECT_EQ(s.per_dimension[i][0], s.per_metric[i][0] + s.per_metric[i][1]);
    EXPECT_EQ(s.per_dimension[i][3], s.per_metric[i][6]);
  }
}

TEST(Ranking, ConservationAndReferenceAgreement) {
  const auto r = testing_support::check_ranking_conservation(2000, 17);
  EXPECT_EQ(r.conservation_failures, 0u);
  EXPECT_EQ(r.reference_mismatches, 0u);
}

TEST(Ranking, MonotoneTransformInvariance) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> recall, art;
    for (int i = 0; i < 6; ++i) {
      recall.push_back(static_cast<double>(rng() % 5) / 10);
      art.push_back(static_cast<double>(rng() % 5));
    }
    auto transformed = recall;
    for (auto& v : transformed) v = std::exp(3 * v) + 7;
    const auto a = rank_scores(pool(recall, art));
    const auto b = rank_scores(pool(transformed, art));
    EXPECT_EQ(a.per_metric, b.per_metric);
  }
}

TEST(Ranking, Errors) {
  EXPECT_THROW(rank_scores(pool({0.5}, {1})), Error);
  auto p = pool({0.5, 0.3}, {1, 2});
  p[1].second.arq = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(rank_scores(p), Error);
}

TEST(Format, FixedRoundsHalfToEvenOnDecimalValue) {
  EXPECT_EQ(format_fixed(0.31415), "0.3142");
  EXPECT_EQ(format_fixed(0.31425), "0.3142");
  EXPECT_EQ(format_fixed(0.12345), "0.1234");
  EXPECT_EQ(format_fixed(0.12355), "0.1236");
  EXPECT_EQ(format_fixed(0.99995), "1.0000");
  EXPECT_EQ(format_fixed(232.2), "232.2000");
  EXPECT_EQ(format_fixed(0.0), "0.0000");
  EXPECT_EQ(format_fixed(-0.00001), "0.0000");
  EXPECT_EQ(format_fixed(-1.23456), "-1.2346");
  EXPECT_EQ(format_fixed(1e-9), "0.0000");
  EXPECT_EQ(format_fixed(12345.6), "12345.6000");
  EXPECT_EQ(format_fixed(std::numeric_limits<double>::quiet_NaN()), "n/a");
  EXPECT_EQ(format_fixed(2.5, 0), "2");
  EXPECT_EQ(format_fixed(3.5, 0), "4");
}

TEST(Format, FullRoundTrips) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::uniform_real_distribution<double>(-1e6, 1e6)(rng);
    EXPECT_EQ(std::stod(format_full(v)), v);
  }
}

TEST(Report, MarkdownLayout) {
  const auto md = render_markdown(sample_inputs());
  EXPECT_NE(md.find("Accuracy: Recall@5"), std::string::npos);
  EXPECT_NE(md.find("Accuracy: NDCG@5"), std::string::npos);
  EXPECT_NE(md.find("Fairness: ARP"), std::string::npos);
  EXPECT_NE(md.find("Stability: ARR"), std::string::npos);
  EXPECT_NE(md.find("Efficiency: ART(s)"), std::string::npos);
  EXPECT_NE(md.find("| GPT-4.1 | 0.3142 |"), std::string::npos);
  EXPECT_NE(md.find("| GPT-4.1 (few-shot-5) | 0.1000 |"), std::string::npos);
  EXPECT_NE(md.find("0.8152"), std::string::npos);
  EXPECT_NE(md.find("## Ranking scores"), std::string::npos);
  EXPECT_NE(md.find("| GPT-4.1 | 9400 | 9430 | 943 |"), std::string::npos);
}

TEST(Report, CsvKeepsFullPrecision) {
  const auto csv = render_csv(sample_inputs());
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "model,mode,Recall@5,NDCG@5,ARP,ARQ,ARQV,ARR,ART(s),users,executions,successes,failures,quality_skips");
  EXPECT_NE(csv.find("GPT-4.1,full,0.31415,"), std::string::npos);
  EXPECT_NE(csv.find("GPT-4.1,few_shot_5,0.1,"), std::string::npos);
  const auto overall = render_overall_scores_csv(sample_inputs());
  EXPECT_EQ(overall.substr(0, overall.find('\n')),
            "model,recall,ndcg,arp,arq,arqv,arr,art,accuracy,fairness,stability,efficiency,overall");
  const auto hall = render_hallucination_csv(sample_inputs());
  EXPECT_NE(hall.find("GPT-4.1 (few-shot-5),3,100,0.03\n"), std::string::npos);
}

TEST(Report, PerUserCsvLeavesUndefinedCellsEmpty) {
  std::vector<UserMetrics> rows = {{1, 1.0, 1.0, 15.0, std::nullopt, std::nullopt, 1.0}};
  EXPECT_EQ(render_per_user_csv(rows), "user_id,recall,ndcg,arp,arq,arqv,arr\n1,1,1,15,,,1\n");
}

TEST(Report, EmitWritesArtifacts) {
  TempDir dir;
  const std::vector<ReportFormat> formats = {ReportFormat::markdown, ReportFormat::csv};
  const auto written = emit_report(sample_inputs(), formats, dir.path());
  EXPECT_EQ(written, (std::vector<std::string>{"report.md", "report.csv", "overall_scores.csv", "hallucination.csv"}));
  for (const auto& f : written) EXPECT_TRUE(std::filesystem::exists(dir / f));
  EXPECT_EQ(testing_support::read_text(dir / "report.md"), render_markdown(sample_inputs()));
  EXPECT_THROW(emit_report(ReportInputs{}, formats, dir.path()), Error);
  EXPECT_THROW(parse_report_format("pdf"), ConfigError);
}

TEST(Artifacts, ManifestHashesAndVerification) {
  TempDir dir;
  testing_support::write_text(dir / "a.txt", "abc");
  testing_support::write_text(dir / "sub" / "b.txt", "");
  const auto manifest = persist_manifest(dir.path());
  ASSERT_EQ(manifest.size(), 2u);
  EXPECT_EQ(manifest.at("a.txt"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(manifest.at("sub/b.txt"), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(read_manifest(dir.path()), manifest);
  EXPECT_TRUE(verify_manifest(dir.path()).empty());

  testing_support::write_text(dir / "a.txt", "abd");
  std::filesystem::remove(dir / "sub" / "b.txt");
  EXPECT_EQ(verify_manifest(dir.path()), (std::vector<std::string>{"a.txt", "sub/b.txt"}));
}

TEST(Artifacts, AtomicWriteLeavesNoTemporary) {
  TempDir dir;
  write_file_atomic(dir / "x.json", "{}");
  write_file_atomic(dir / "x.json", "{\"a\":1}");
  EXPECT_EQ(read_file(dir / "x.json"), "{\"a\":1}");
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
    (void)e;
    ++files;
  }
  EXPECT_EQ(files, 1u);

  write_file_atomic(dir / "nested" / "deeper" / "y", "1");
  EXPECT_EQ(read_file(dir / "nested" / "deeper" / "y"), "1");
  // A regular file where a directory is needed cannot be written through.
  EXPECT_ANY_THROW(write_file_atomic(dir / "x.json" / "z", "1"));
}
