#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "recbench/error.hpp"
#include "recbench/metrics.hpp"
#include "support/random_instances.hpp"

using namespace recbench;

namespace {

PerUserObservation obs(ItemId gt, std::vector<std::vector<ItemId>> runs, UserId user = 1) {
  PerUserObservation o;
  o.user = user;
  o.ground_truth = gt;
  int r = 1;
  for (auto& items : runs) o.runs.push_back(ExtractedList{user, r++, items, {}, items.size()});
  return o;
}

ItemStatsMap quality_stats(std::vector<std::pair<ItemId, std::optional<double>>> q) {
  ItemStatsMap m;
  for (auto& [id, v] : q) m[id] = ItemStats{id, 0, v};
  return m;
}

}  // namespace

TEST(Metrics, RecallExamples) {
  EXPECT_EQ(recall_at_k(obs(7, {{3, 7, 9, 1, 2}}), 5), 1.0);
  EXPECT_EQ(recall_at_k(obs(7, {{3, 9, 1}}), 5), 0.0);
  EXPECT_EQ(recall_at_k(obs(7, {{7, 1}, {3, 1}}), 5), 0.5);
  EXPECT_EQ(recall_at_k(obs(7, {{1, 2, 3, 4, 5, 7}}), 5), 0.0);  // beyond the cutoff
}

TEST(Metrics, NdcgExamples) {
  EXPECT_EQ(ndcg_at_k(obs(7, {{7, 1}}), 5), 1.0);
  EXPECT_EQ(*ndcg_at_k(obs(7, {{1, 7}}), 5), 1.0 / std::log2(3.0));
  EXPECT_NEAR(*ndcg_at_k(obs(7, {{1, 7}}), 5), 0.63093, 5e-6);
  EXPECT_EQ(ndcg_at_k(obs(7, {{1, 2}}), 5), 0.0);
}

TEST(Metrics, ArpExamples) {
  ItemStatsMap pops;
  pops[1] = {1, 10, {}};
  pops[2] = {2, 20, {}};
  pops[3] = {3, 3, {}};
  pops[4] = {4, 3, {}};
  pops[5] = {5, 3, {}};
  pops[6] = {6, 30, {}};
  EXPECT_EQ(arp_at_k(obs(9, {{1, 2}}), pops, 5), 15.0);
  std::vector<PerUserObservation> two = {obs(9, {{1}}, 1), obs(9, {{6}}, 2)};
  EXPECT_EQ(arp_at_k(two, pops, 5), 20.0);
  EXPECT_EQ(arp_at_k(obs(9, {{3, 4, 5}}), pops, 5), 3.0);
}

TEST(Metrics, ArqExamplesAndSkips) {
  auto q = quality_stats({{1, 4.0}, {2, 5.0}, {3, std::nullopt}, {4, 3.0}});
  EXPECT_EQ(arq_at_k(obs(9, {{1, 2}}), q, 5), 4.5);
  std::size_t skipped = 0;
  EXPECT_EQ(arq_at_k(obs(9, {{1, 3}}), q, 5, &skipped), 4.0);
  EXPECT_EQ(skipped, 1u);
  std::vector<PerUserObservation> two = {obs(9, {{4}}, 1), obs(9, {{1}}, 2)};
  EXPECT_EQ(arq_at_k(two, q, 5), 3.5);
  EXPECT_FALSE(arq_at_k(obs(9, {{3}}), q, 5).has_value());
}

TEST(Metrics, ArqvExamples) {
  auto q = quality_stats({{1, 4.0}, {2, 4.0}, {3, 4.0}, {4, 3.0}, {5, 5.0}});
  EXPECT_EQ(arqv_at_k(obs(9, {{1, 2, 3}}), q, 5), 0.0);
  EXPECT_EQ(arqv_at_k(obs(9, {{4, 5}}), q, 5), 1.0);
  EXPECT_EQ(arqv_at_k(obs(9, {{1, 2}, {4, 5}}), q, 5), 0.5);
  EXPECT_EQ(arqv_at_k(obs(9, {{4}}), q, 5), 0.0);
}

TEST(Metrics, ArrExamples) {
  EXPECT_EQ(arr_at_k(obs(9, {{1, 2, 3, 4, 5}, {1, 2, 3, 4, 5}}), 5), 1.0);
  EXPECT_EQ(arr_at_k(obs(9, {{1, 2}, {3, 4}}), 2), 0.0);
  EXPECT_EQ(*arr_at_k(obs(9, {{1, 2}, {1, 3}, {4, 5}}), 2), 1.0 / 3.0);
  EXPECT_EQ(arr_at_k(obs(9, {{4, 5}}), 2), 1.0);
  // Short identical lists are penalized through the requested K.
  EXPECT_EQ(arr_at_k(obs(9, {{1, 2}, {1, 2}}), 4), 0.5);
  // Order within runs and across runs does not matter.
  EXPECT_EQ(arr_at_k(obs(9, {{2, 1}, {4, 5}, {3, 1}}), 2), 1.0 / 3.0);
}

TEST(Metrics, ArtExamples) {
  EXPECT_DOUBLE_EQ(art(TimingLog{{{"a", 0.2}, {"b", 0.4}}}), 0.3);
  EXPECT_EQ(art(TimingLog{{{"a", 1.0}}}), 1.0);
  TimingLog ten;
  for (int i = 0; i < 10; ++i) ten.entries.push_back({std::to_string(i), 0.25});
  EXPECT_EQ(art(ten), 0.25);
  EXPECT_THROW(art(TimingLog{}), Error);
}

TEST(Metrics, FailedRunsLeaveDenominators) {
  std::vector<PerUserObservation> users = {obs(7, {{7}, {}, {3}}, 1), obs(7, {{}, {}}, 2)};
  EXPECT_EQ(recall_at_k(users, 5), 0.5);
  EXPECT_EQ(arr_at_k(users, 1), 0.0);
  const auto rep = evaluate(users, {}, TimingLog{{{"x", 1.0}}}, EvalConfig{5, 3});
  EXPECT_EQ(rep.num_users, 1u);
  EXPECT_EQ(rep.failures, 3u);
  EXPECT_EQ(rep.num_executions, 1u);

  std::vector<PerUserObservation> none = {obs(7, {{}}, 1)};
  EXPECT_TRUE(std::isnan(recall_at_k(none, 5)));
  EXPECT_TRUE(std::isnan(evaluate(none, {}, TimingLog{}, EvalConfig{}).art_seconds));
}

TEST(Metrics, AggregationIgnoresInputOrder) {
  std::vector<PerUserObservation> a = {obs(1, {{1, 2}}, 3), obs(2, {{1, 2}}, 1), obs(5, {{5}}, 2)};
  std::vector<PerUserObservation> b = {a[1], a[2], a[0]};
  EXPECT_EQ(ndcg_at_k(a, 5), ndcg_at_k(b, 5));
  const auto rows = per_user_metrics(a, {}, 5);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].user, 1);
  EXPECT_EQ(rows[2].user, 3);
}

TEST(Metrics, OracleEquivalenceOnRandomInstances) {
  std::mt19937_64 rng(1234);
  for (int i = 0; i < 1000; ++i) {
    const auto in = testing_support::random_instance(rng);
    const auto diff = testing_support::compare_with_oracle(in, 1e-9);
    ASSERT_TRUE(diff.empty()) << "instance " << i << ": " << diff;
  }
}

TEST(Metrics, RangeAndOrderingProperties) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 300; ++i) {
    const auto in = testing_support::random_instance(rng);
    for (const auto& o : in.users) {
      auto r = recall_at_k(o, in.k);
      auto n = ndcg_at_k(o, in.k);
      auto a = arr_at_k(o, in.k);
      if (!r) continue;
      EXPECT_GE(*r, 0.0);
      EXPECT_LE(*r, 1.0);
      EXPECT_LE(*n, *r + 1e-15);
      EXPECT_GE(*a, 0.0);
      EXPECT_LE(*a, 1.0);
      if (auto v = arqv_at_k(o, in.stats, in.k)) EXPECT_GE(*v, 0.0);

      // Permuting items within lists leaves set statistics unchanged; permuting runs leaves ARR.
      PerUserObservation p = o;
      for (auto& l : p.runs) std::reverse(l.items.begin(), l.items.end());
      std::reverse(p.runs.begin(), p.runs.end());
      bool all_within_k = true;
      for (auto& l : o.runs) all_within_k &= static_cast<int>(l.items.size()) <= in.k;
      if (all_within_k) {
        EXPECT_NEAR(arr_at_k(p, in.k).value(), *a, 1e-12);
        EXPECT_NEAR(arp_at_k(p, in.stats, in.k).value(), arp_at_k(o, in.stats, in.k).value(), 1e-9);
        auto q1 = arq_at_k(p, in.stats, in.k), q2 = arq_at_k(o, in.stats, in.k);
        EXPECT_EQ(q1.has_value(), q2.has_value());
        if (q1) EXPECT_NEAR(*q1, *q2, 1e-12);
      }
    }
  }
}

TEST(Metrics, IdenticalRunsGiveFullRepetition) {
  auto q = quality_stats({{1, 2.0}, {2, 4.0}, {3, 5.0}});
  const auto single = obs(1, {{1, 2, 3}});
  const auto repeated = obs(1, {{1, 2, 3}, {1, 2, 3}, {1, 2, 3}});
  EXPECT_EQ(arr_at_k(repeated, 3), 1.0);
  EXPECT_DOUBLE_EQ(*arqv_at_k(repeated, q, 3), *arqv_at_k(single, q, 3));
}
