#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "recbench/dataset.hpp"
#include "recbench/extraction.hpp"

namespace recbench {

struct EvalConfig {
  int k = 5;
  int repetitions = 10;
};

// One user's ground truth and every repetition's extracted list. Runs with an empty item list
// are unsuccessful executions and are left out of every metric's denominator.
struct PerUserObservation {
  UserId user = 0;
  ItemId ground_truth = 0;
  std::vector<ExtractedList> runs;
};

struct TimingEntry {
  std::string run_id;
  double elapsed_seconds = 0.0;
};

struct TimingLog {
  std::vector<TimingEntry> entries;
  std::size_t count() const { return entries.size(); }
};

// Per-user values; nullopt marks a metric the user does not contribute to.
struct UserMetrics {
  UserId user = 0;
  std::optional<double> recall, ndcg, arp, arq, arqv, arr;
};

struct MetricReport {
  double recall_at_k = 0.0;
  double ndcg_at_k = 0.0;
  double arp = 0.0;
  double arq = 0.0;
  double arqv = 0.0;
  double arr = 0.0;
  double art_seconds = 0.0;
  std::size_t num_users = 0;       // users with at least one successful run
  std::size_t num_executions = 0;  // successful runs timed
  std::size_t failures = 0;        // unsuccessful runs
  std::size_t quality_skips = 0;   // recommended items with undefined quality
};

// --- per-user metrics ------------------------------------------------------------------------
// All of these return nullopt when the user has no successful run (or, for quality metrics, no
// run with a quality-defined item).

std::optional<double> recall_at_k(const PerUserObservation& obs, int k);
std::optional<double> ndcg_at_k(const PerUserObservation& obs, int k);
std::optional<double> arp_at_k(const PerUserObservation& obs, const ItemStatsMap& stats, int k);
std::optional<double> arq_at_k(const PerUserObservation& obs, const ItemStatsMap& stats, int k,
                               std::size_t* skipped = nullptr);
std::optional<double> arqv_at_k(const PerUserObservation& obs, const ItemStatsMap& stats, int k,
                                std::size_t* skipped = nullptr);
// Rep_n counts items of run n also present in any other run; the sum is divided by T*K with
// the requested K, so short lists lower the score. A single successful run scores 1.
std::optional<double> arr_at_k(const PerUserObservation& obs, int k);

// Mean elapsed time; throws Error on an empty log.
double art(const TimingLog& timings);

// --- aggregates over users -------------------------------------------------------------------
// Each is the mean of the per-user values, summed in ascending user id order.

double recall_at_k(std::span<const PerUserObservation> users, int k);
double ndcg_at_k(std::span<const PerUserObservation> users, int k);
double arp_at_k(std::span<const PerUserObservation> users, const ItemStatsMap& stats, int k);
double arq_at_k(std::span<const PerUserObservation> users, const ItemStatsMap& stats, int k);
double arqv_at_k(std::span<const PerUserObservation> users, const ItemStatsMap& stats, int k);
double arr_at_k(std::span<const PerUserObservation> users, int k);

std::vector<UserMetrics> per_user_metrics(std::span<const PerUserObservation> users,
                                          const ItemStatsMap& stats, int k);

// All seven metrics. Undefined aggregates (no contributing user, empty timing log) are NaN.
MetricReport evaluate(std::span<const PerUserObservation> users, const ItemStatsMap& stats,
                      const TimingLog& timings, const EvalConfig& cfg);

}  // namespace recbench
