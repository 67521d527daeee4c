#include "recbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "recbench/error.hpp"

namespace recbench {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::span<const ItemId> top_k(const ExtractedList& list, int k) {
  const auto n = std::min(list.items.size(), static_cast<std::size_t>(std::max(k, 0)));
  return std::span<const ItemId>(list.items.data(), n);
}

std::vector<const ExtractedList*> successful_runs(const PerUserObservation& obs) {
  std::vector<const ExtractedList*> runs;
  for (const auto& r : obs.runs) {
    if (!r.items.empty()) runs.push_back(&r);
  }
  return runs;
}

template <typename PerRun>
std::optional<double> mean_over_runs(const PerUserObservation& obs, PerRun&& per_run) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const ExtractedList* run : successful_runs(obs)) {
    if (std::optional<double> v = per_run(*run)) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::vector<double> defined_qualities(std::span<const ItemId> items, const ItemStatsMap& stats,
                                      std::size_t* skipped) {
  std::vector<double> q;
  q.reserve(items.size());
  for (ItemId id : items) {
    auto it = stats.find(id);
    if (it != stats.end() && it->second.quality) {
      q.push_back(*it->second.quality);
    } else if (skipped) {
      ++*skipped;
    }
  }
  return q;
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<const PerUserObservation*> by_user(std::span<const PerUserObservation> users) {
  std::vector<const PerUserObservation*> sorted;
  sorted.reserve(users.size());
  for (const auto& u : users) sorted.push_back(&u);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto* a, const auto* b) { return a->user < b->user; });
  return sorted;
}

template <typename PerUser>
double mean_over_users(std::span<const PerUserObservation> users, PerUser&& per_user) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const PerUserObservation* obs : by_user(users)) {
    if (std::optional<double> v = per_user(*obs)) {
      sum += *v;
      ++n;
    }
  }
  return n == 0 ? kNaN : sum / static_cast<double>(n);
}

}  // namespace

std::optional<double> recall_at_k(const PerUserObservation& obs, int k) {
  return mean_over_runs(obs, [&](const ExtractedList& run) -> std::optional<double> {
    auto items = top_k(run, k);
    return std::find(items.begin(), items.end(), obs.ground_truth) != items.end() ? 1.0 : 0.0;
  });
}

std::optional<double> ndcg_at_k(const PerUserObservation& obs, int k) {
  return mean_over_runs(obs, [&](const ExtractedList& run) -> std::optional<double> {
    auto items = top_k(run, k);
    auto it = std::find(items.begin(), items.end(), obs.ground_truth);
    if (it == items.end()) return 0.0;
    const auto rank = static_cast<double>(it - items.begin()) + 1.0;
    return 1.0 / std::log2(rank + 1.0);
  });
}

std::optional<double> arp_at_k(const PerUserObservation& obs, const ItemStatsMap& stats, int k) {
  return mean_over_runs(obs, [&](const ExtractedList& run) -> std::optional<double> {
    auto items = top_k(run, k);
    double sum = 0.0;
    for (ItemId id : items) {
      auto it = stats.find(id);
      if (it != stats.end()) sum += static_cast<double>(it->second.popularity);
    }
    return sum / static_cast<double>(items.size());
  });
}

std::optional<double> arq_at_k(const PerUserObservation& obs, const ItemStatsMap& stats, int k,
                               std::size_t* skipped) {
  return mean_over_runs(obs, [&](const ExtractedList& run) -> std::optional<double> {
    auto q = defined_qualities(top_k(run, k), stats, skipped);
    if (q.empty()) return std::nullopt;
    return mean(q);
  });
}

std::optional<double> arqv_at_k(const PerUserObservation& obs, const ItemStatsMap& stats, int k,
                                std::size_t* skipped) {
  return mean_over_runs(obs, [&](const ExtractedList& run) -> std::optional<double> {
    auto q = defined_qualities(top_k(run, k), stats, skipped);
    if (q.empty()) return std::nullopt;
    const double m = mean(q);
    double ss = 0.0;
    for (double v : q) ss += (v - m) * (v - m);
    return ss / static_cast<double>(q.size());
  });
}

std::optional<double> arr_at_k(const PerUserObservation& obs, int k) {
  const auto runs = successful_runs(obs);
  if (runs.empty()) return std::nullopt;
  if (runs.size() == 1) return 1.0;

  std::vector<std::unordered_set<ItemId>> sets;
  sets.reserve(runs.size());
  for (const auto* run : runs) {
    auto items = top_k(*run, k);
    sets.emplace_back(items.begin(), items.end());
  }
  double repeated = 0.0;
  for (std::size_t n = 0; n < sets.size(); ++n) {
    std::size_t rep = 0;
    for (ItemId id : sets[n]) {
      for (std::size_t m = 0; m < sets.size(); ++m) {
        if (m != n && sets[m].count(id)) {
          ++rep;
          break;
        }
      }
    }
    repeated += static_cast<double>(rep);
  }
  return repeated / (static_cast<double>(sets.size()) * static_cast<double>(k));
}

double art(const TimingLog& timings) {
  if (timings.entries.empty()) throw Error("ART undefined: empty timing log");
  double sum = 0.0;
  for (const auto& e : timings.entries) sum += e.elapsed_seconds;
  return sum / static_cast<double>(timings.entries.size());
}

double recall_at_k(std::span<const PerUserObservation> users, int k) {
  return mean_over_users(users, [&](const auto& o) { return recall_at_k(o, k); });
}

double ndcg_at_k(std::span<const PerUserObservation> users, int k) {
  return mean_over_users(users, [&](const auto& o) { return ndcg_at_k(o, k); });
}

double arp_at_k(std::span<const PerUserObservation> users, const ItemStatsMap& stats, int k) {
  return mean_over_users(users, [&](const auto& o) { return arp_at_k(o, stats, k); });
}

double arq_at_k(std::span<const PerUserObservation> users, const ItemStatsMap& stats, int k) {
  return mean_over_users(users, [&](const auto& o) { return arq_at_k(o, stats, k); });
}

double arqv_at_k(std::span<const PerUserObservation> users, const ItemStatsMap& stats, int k) {
  return mean_over_users(users, [&](const auto& o) { return arqv_at_k(o, stats, k); });
}

double arr_at_k(std::span<const PerUserObservation> users, int k) {
  return mean_over_users(users, [&](const auto& o) { return arr_at_k(o, k); });
}

std::vector<UserMetrics> per_user_metrics(std::span<const PerUserObservation> users,
                                          const ItemStatsMap& stats, int k) {
  std::vector<UserMetrics> rows;
  rows.reserve(users.size());
  for (const PerUserObservation* obs : by_user(users)) {
    UserMetrics row;
    row.user = obs->user;
    row.recall = recall_at_k(*obs, k);
    row.ndcg = ndcg_at_k(*obs, k);
    row.arp = arp_at_k(*obs, stats, k);
    row.arq = arq_at_k(*obs, stats, k);
    row.arqv = arqv_at_k(*obs, stats, k);
    row.arr = arr_at_k(*obs, k);
    rows.push_back(row);
  }
  return rows;
}

MetricReport evaluate(std::span<const PerUserObservation> users, const ItemStatsMap& stats,
                      const TimingLog& timings, const EvalConfig& cfg) {
  MetricReport report;
  const int k = cfg.k;
  report.recall_at_k = recall_at_k(users, k);
  report.ndcg_at_k = ndcg_at_k(users, k);
  report.arp = arp_at_k(users, stats, k);
  report.arq = arq_at_k(users, stats, k);
  report.arqv = arqv_at_k(users, stats, k);
  report.arr = arr_at_k(users, k);
  report.art_seconds = timings.entries.empty() ? kNaN : art(timings);
  report.num_executions = timings.count();

  std::size_t dropped_users = 0;
  for (const auto& obs : users) {
    const auto ok = successful_runs(obs).size();
    report.failures += obs.runs.size() - ok;
    if (ok > 0) {
      ++report.num_users;
    } else {
      ++dropped_users;
    }
    std::size_t skipped = 0;
    arq_at_k(obs, stats, k, &skipped);
    report.quality_skips += skipped;
  }
  if (dropped_users > 0) {
    spdlog::info("{} users without a successful run excluded from U", dropped_users);
  }
  if (cfg.repetitions == 1) {
    spdlog::info("T = 1: ARR is 1.0 by convention");
  }
  return report;
}

}  // namespace recbench
