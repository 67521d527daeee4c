#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "recbench/dataset.hpp"
#include "recbench/extraction.hpp"
#include "recbench/metrics.hpp"

namespace {

recbench::NormalizedDataset synthetic_dataset(int users, int per_user, int items) {
  recbench::NormalizedDataset ds;
  ds.name = "synthetic";
  std::mt19937_64 gen(7);
  for (int u = 1; u <= users; ++u) {
    for (int i = 0; i < per_user; ++i) {
      ds.interactions.push_back({u, static_cast<recbench::ItemId>(gen() % items) + 1,
                                 static_cast<double>(gen() % 5 + 1), static_cast<std::int64_t>(gen() % 100000)});
    }
  }
  for (int i = 1; i <= items; ++i) ds.catalog.push_back({i, {}});
  ds.universe_size = items;
  return ds;
}

void BM_BuildEvalSet(benchmark::State& state) {
  const auto ds = synthetic_dataset(static_cast<int>(state.range(0)), 100, 1682);
  const recbench::DatasetSpec spec{"synthetic", 5, 50, 0.9};
  for (auto _ : state) {
    auto eval = recbench::build_eval_set(ds, spec);
    benchmark::DoNotOptimize(eval.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ds.interactions.size()));
}
BENCHMARK(BM_BuildEvalSet)->Arg(943)->Arg(5000);

void BM_ExtractCanonical(benchmark::State& state) {
  const std::string text = "42,15,301,2,104";
  for (auto _ : state) {
    auto list = recbench::extract_and_validate(text, 1682, 5);
    benchmark::DoNotOptimize(list.items.data());
  }
}
BENCHMARK(BM_ExtractCanonical);

void BM_ExtractVerbose(benchmark::State& state) {
  std::string text = "Here are my picks for this user, in order of likelihood:\n";
  for (int i = 1; i <= 20; ++i) {
    text += std::to_string(i) + ". Item " + std::to_string(i * 37 % 1700) + " because it resembles item " +
            std::to_string(i * 11) + " from 1995.\n";
  }
  for (auto _ : state) {
    auto list = recbench::extract_and_validate(text, 1682, 5);
    benchmark::DoNotOptimize(list.items.data());
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ExtractVerbose);

void BM_Evaluate(benchmark::State& state) {
  const int users = static_cast<int>(state.range(0));
  const int k = 5, t = 10;
  std::mt19937_64 gen(11);
  recbench::ItemStatsMap stats;
  for (int i = 1; i <= 1682; ++i) stats[i] = {i, static_cast<std::int64_t>(gen() % 500), 1.0 + (gen() % 400) / 100.0};
  std::vector<recbench::PerUserObservation> obs;
  recbench::TimingLog timings;
  for (int u = 1; u <= users; ++u) {
    recbench::PerUserObservation o{u, static_cast<recbench::ItemId>(gen() % 1682) + 1, {}};
    for (int r = 1; r <= t; ++r) {
      std::vector<recbench::RawId> ids;
      for (int j = 0; j < k; ++j) ids.push_back(static_cast<recbench::RawId>(gen() % 1682) + 1);
      o.runs.push_back(recbench::validate_ids(ids, 1682, k, u, r));
      timings.entries.push_back({"", 0.01});
    }
    obs.push_back(std::move(o));
  }
  for (auto _ : state) {
    auto report = recbench::evaluate(obs, stats, timings, {k, t});
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_Evaluate)->Arg(943);

}  // namespace

BENCHMARK_MAIN();
