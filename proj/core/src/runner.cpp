#include "recbench/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "recbench/artifacts.hpp"
#include "recbench/error.hpp"
#include "recbench/extraction.hpp"

namespace recbench {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using nlohmann::json;

constexpr std::string_view kModelsDir = "models";

// ---- persisted run state ------------------------------------------------------------------------

std::string slot_dir_name(const std::string& model, SequenceMode mode) {
  std::string out;
  for (char c : model) {
    const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '-' || c == '_' || c == '.';
    out.push_back(safe ? c : '_');
  }
  if (!mode.is_full()) out += "__" + mode.label();
  return out;
}

struct Slot {
  std::string model;
  SequenceMode mode;
  RunSource source = RunSource::builtin;
  int order = 0;
  fs::path dir;
};

void write_slot(const Slot& slot) {
  ojson doc;
  doc["name"] = slot.model;
  doc["mode"] = slot.mode.label();
  doc["source"] = std::string(to_string(slot.source));
  doc["order"] = slot.order;
  write_file_atomic(slot.dir / "model.json", doc.dump(2) + "\n");
}

std::vector<Slot> read_slots(const fs::path& run_dir) {
  std::vector<Slot> slots;
  const fs::path root = run_dir / kModelsDir;
  if (!fs::exists(root)) return slots;
  for (const auto& entry : fs::directory_iterator(root)) {
    const fs::path meta = entry.path() / "model.json";
    if (!entry.is_directory() || !fs::exists(meta)) continue;
    try {
      const auto doc = json::parse(read_file(meta));
      Slot slot;
      slot.model = doc.at("name").get<std::string>();
      slot.mode = parse_sequence_mode(doc.at("mode").get<std::string>());
      slot.source = parse_run_source(doc.at("source").get<std::string>());
      slot.order = doc.at("order").get<int>();
      slot.dir = entry.path();
      slots.push_back(std::move(slot));
    } catch (const json::exception& e) {
      throw ParseError(meta.string(), 0, e.what());
    }
  }
  std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
    return a.order != b.order ? a.order < b.order : a.dir.filename() < b.dir.filename();
  });
  return slots;
}

std::string eval_set_jsonl(const std::vector<UserSequence>& eval_set) {
  std::string out;
  for (const auto& seq : eval_set) {
    ojson line;
    line["user"] = seq.user;
    line["history"] = seq.history;
    line["ground_truth"] = seq.ground_truth;
    out += line.dump() + "\n";
  }
  return out;
}

std::vector<UserSequence> read_eval_set(const fs::path& run_dir) {
  const fs::path path = run_dir / "eval_set.jsonl";
  std::istringstream in(read_file(path));
  std::vector<UserSequence> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto obj = json::parse(line);
      UserSequence seq;
      seq.user = obj.at("user").get<UserId>();
      seq.history = obj.at("history").get<std::vector<ItemId>>();
      seq.ground_truth = obj.at("ground_truth").get<ItemId>();
      out.push_back(std::move(seq));
    } catch (const json::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
  return out;
}

std::string item_stats_jsonl(const ItemStatsMap& stats) {
  std::string out;
  for (const auto& [id, s] : stats) {
    ojson line;
    line["item"] = id;
    line["popularity"] = s.popularity;
    line["quality"] = s.quality ? ojson(*s.quality) : ojson(nullptr);
    out += line.dump() + "\n";
  }
  return out;
}

ItemStatsMap read_item_stats(const fs::path& run_dir) {
  const fs::path path = run_dir / "item_stats.jsonl";
  std::istringstream in(read_file(path));
  ItemStatsMap stats;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto obj = json::parse(line);
      ItemStats s;
      s.id = obj.at("item").get<ItemId>();
      s.popularity = obj.at("popularity").get<std::int64_t>();
      if (!obj.at("quality").is_null()) s.quality = obj.at("quality").get<double>();
      stats[s.id] = s;
    } catch (const json::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
  return stats;
}

struct DatasetInfo {
  std::string name;
  ItemId universe_size = 0;
};

DatasetInfo read_dataset_info(const fs::path& run_dir) {
  const fs::path path = run_dir / "dataset.json";
  try {
    const auto doc = json::parse(read_file(path));
    return {doc.at("name").get<std::string>(), doc.at("universe_size").get<ItemId>()};
  } catch (const json::exception& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

RunConfig read_run_config(const fs::path& run_dir) {
  return validate_config(read_file(run_dir / "config.json"), run_dir);
}

// ---- responses.jsonl ----------------------------------------------------------------------------

std::string response_line(const RecommendationRun& run) {
  ojson line;
  line["user"] = run.user;
  line["run"] = run.run;
  line["source"] = std::string(to_string(run.source));
  line["model"] = run.model;
  line["raw"] = run.raw_text;
  line["items"] = run.items;
  line["elapsed_s"] = run.elapsed_seconds;
  line["failed"] = run.failed;
  if (!run.error.empty()) line["error"] = run.error;
  return line.dump();
}

RecommendationRun parse_response(const json& obj) {
  RecommendationRun run;
  run.user = obj.at("user").get<UserId>();
  run.run = obj.at("run").get<int>();
  run.source = parse_run_source(obj.at("source").get<std::string>());
  run.model = obj.at("model").get<std::string>();
  run.raw_text = obj.at("raw").get<std::string>();
  run.items = obj.at("items").get<std::vector<RawId>>();
  run.elapsed_seconds = obj.at("elapsed_s").get<double>();
  run.failed = obj.at("failed").get<bool>();
  if (auto it = obj.find("error"); it != obj.end()) run.error = it->get<std::string>();
  return run;
}

// `tolerate_partial` skips an unparseable final line left behind by an interrupted run.
std::vector<RecommendationRun> read_responses(const fs::path& path, bool tolerate_partial) {
  if (!fs::exists(path)) throw Error("missing responses file: " + path.string());
  std::istringstream in(read_file(path));
  std::vector<RecommendationRun> runs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      runs.push_back(parse_response(json::parse(line)));
    } catch (const std::exception& e) {
      if (tolerate_partial && in.peek() == std::char_traits<char>::eof()) {
        spdlog::warn("{}:{}: dropping truncated response line", path.string(), line_no);
        break;
      }
      throw ParseError(path.string(), line_no, e.what());
    }
  }
  return runs;
}

// One record per (user, run), preferring successful ones, sorted by (user, run).
std::vector<RecommendationRun> canonical_runs(std::vector<RecommendationRun> runs) {
  std::map<std::pair<UserId, int>, RecommendationRun> by_key;
  for (auto& r : runs) {
    auto key = std::make_pair(r.user, r.run);
    auto it = by_key.find(key);
    if (it == by_key.end() || (it->second.failed && !r.failed)) by_key[key] = std::move(r);
  }
  std::vector<RecommendationRun> out;
  out.reserve(by_key.size());
  for (auto& [key, r] : by_key) out.push_back(std::move(r));
  return out;
}

void write_responses(const fs::path& path, const std::vector<RecommendationRun>& runs) {
  std::string out;
  for (const auto& r : runs) out += response_line(r) + "\n";
  write_file_atomic(path, out);
}

// ---- adapters ---------------------------------------------------------------------------------

struct RunContext {
  const RunConfig& cfg;
  const NormalizedDataset& dataset;
  const std::vector<UserSequence>& eval_set;
  const ItemStatsMap& stats;
  RunSummary& summary;
};

std::vector<RecommendationRun> run_builtin(const RunContext& ctx, const ModelConfig& model) {
  std::vector<RecommendationRun> runs;
  for (const auto& seq : ctx.eval_set) {
    for (int r = 1; r <= ctx.cfg.eval.repetitions; ++r) {
      RecommendationRun run;
      run.user = seq.user;
      run.run = r;
      run.source = RunSource::builtin;
      run.model = model.name;
      const auto start = std::chrono::steady_clock::now();
      auto items = builtin_recommend(model.builtin, ctx.stats, ctx.dataset.universe_size, ctx.cfg.eval.k,
                                     derive_seed(ctx.cfg.seed, seq.user, r));
      const auto stop = std::chrono::steady_clock::now();
      run.items.assign(items.begin(), items.end());
      run.elapsed_seconds = std::chrono::duration<double>(stop - start).count();
      runs.push_back(std::move(run));
    }
  }
  return runs;
}

std::vector<RecommendationRun> run_llm(const RunContext& ctx, const ModelConfig& model, SequenceMode mode,
                                       const fs::path& responses_path) {
  std::vector<RecommendationRun> done;
  if (fs::exists(responses_path)) {
    for (auto& r : read_responses(responses_path, true)) {
      if (!r.failed) done.push_back(std::move(r));
    }
    done = canonical_runs(std::move(done));
    // Drop earlier failures from the log; they are retried below.
    write_responses(responses_path, done);
  }
  std::set<std::pair<UserId, int>> completed;
  for (const auto& r : done) completed.emplace(r.user, r.run);
  ctx.summary.resumed += completed.size();

  struct WorkItem {
    const UserSequence* seq;
    int run;
  };
  std::vector<WorkItem> work;
  for (const auto& seq : ctx.eval_set) {
    for (int r = 1; r <= ctx.cfg.eval.repetitions; ++r) {
      if (!completed.count({seq.user, r})) work.push_back({&seq, r});
    }
  }
  if (work.empty()) return done;

  PromptConfig prompt_cfg = ctx.cfg.prompt;
  prompt_cfg.mode = model.prompt_mode;

  std::ofstream log(responses_path, std::ios::binary | std::ios::app);
  if (!log) throw Error("cannot append to " + responses_path.string());

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::atomic<std::size_t> renders{0};
  std::exception_ptr first_error;
  std::vector<RecommendationRun> fresh;

  auto worker = [&] {
    while (!abort.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= work.size()) break;
      try {
        UserSequence shown = *work[i].seq;
        shown.history = apply_sequence_mode(shown.history, mode);
        const RenderedPrompt prompt = render_prompt(shown, ctx.dataset, ctx.stats, prompt_cfg);
        renders.fetch_add(1);
        RecommendationRun run = chat_complete(model.endpoint, prompt, work[i].run);
        run.model = model.name;
        std::lock_guard lock(mu);
        log << response_line(run) << '\n';
        log.flush();
        fresh.push_back(std::move(run));
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first_error) first_error = std::current_exception();
        abort = true;
      }
    }
  };

  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(model.endpoint.max_in_flight), work.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  ctx.summary.prompt_renders += renders.load();
  ctx.summary.requests_sent += fresh.size();
  if (first_error) std::rethrow_exception(first_error);

  for (auto& r : fresh) done.push_back(std::move(r));
  return done;
}

std::vector<RecommendationRun> run_external(const RunContext& ctx, const ModelConfig& model) {
  auto imported = import_recommendations(model.file, ctx.dataset.universe_size, ctx.cfg.eval.k);
  for (auto& r : imported.runs) {
    if (r.model != model.name) {
      spdlog::warn("{}: line for model '{}' imported as '{}'", model.file.string(), r.model, model.name);
      r.model = model.name;
    }
  }
  return std::move(imported.runs);
}

// ---- reporting --------------------------------------------------------------------------------

ReportRow evaluate_slot(const Slot& slot, const std::vector<UserSequence>& eval_set, const ItemStatsMap& stats,
                        ItemId universe_size, const EvalConfig& eval) {
  const fs::path responses = slot.dir / "responses.jsonl";
  const auto runs = canonical_runs(read_responses(responses, false));

  std::map<UserId, PerUserObservation> observations;
  for (const auto& seq : eval_set) observations[seq.user] = {seq.user, seq.ground_truth, {}};

  ReportRow row;
  row.model = slot.model;
  row.mode = slot.mode;
  TimingLog timings;
  std::vector<ExtractedList> lists;
  std::string extracted_out;
  for (const auto& run : runs) {
    ExtractedList list = to_extracted(run, universe_size, eval.k);
    ojson line;
    line["user"] = list.user;
    line["run"] = list.run;
    line["items"] = list.items;
    line["hallucinated"] = list.hallucinated;
    extracted_out += line.dump() + "\n";

    ++row.executions;
    if (!list.items.empty()) {
      ++row.successes;
      timings.entries.push_back({std::to_string(run.user) + "/" + std::to_string(run.run), run.elapsed_seconds});
    }
    auto obs = observations.find(run.user);
    if (obs == observations.end()) {
      spdlog::warn("{}: user {} is not in the evaluation set; ignored", responses.string(), run.user);
    } else {
      obs->second.runs.push_back(list);
    }
    lists.push_back(std::move(list));
  }
  write_file_atomic(slot.dir / "extracted.jsonl", extracted_out);

  std::vector<PerUserObservation> users;
  users.reserve(observations.size());
  for (auto& [id, obs] : observations) users.push_back(std::move(obs));

  row.metrics = evaluate(users, stats, timings, eval);
  row.hallucination = hallucination_rate(lists);
  write_file_atomic(slot.dir / "per_user_metrics.csv", render_per_user_csv(per_user_metrics(users, stats, eval.k)));
  return row;
}

int next_order(const fs::path& run_dir) {
  int order = 0;
  for (const auto& s : read_slots(run_dir)) order = std::max(order, s.order + 1);
  return order;
}

}  // namespace

ReportInputs generate_reports(const fs::path& run_dir, std::span<const ReportFormat> formats) {
  const RunConfig cfg = read_run_config(run_dir);
  const DatasetInfo info = read_dataset_info(run_dir);
  const auto eval_set = read_eval_set(run_dir);
  const auto stats = read_item_stats(run_dir);

  ReportInputs inputs;
  inputs.dataset_name = info.name;
  inputs.k = cfg.eval.k;
  inputs.repetitions = cfg.eval.repetitions;
  for (const Slot& slot : read_slots(run_dir)) {
    inputs.rows.push_back(evaluate_slot(slot, eval_set, stats, info.universe_size, cfg.eval));
  }
  if (inputs.rows.empty()) throw Error("run directory has no model results: " + run_dir.string());

  std::vector<std::pair<std::string, MetricReport>> pool;
  for (const auto& row : inputs.rows) {
    if (!row.mode.is_full() && !cfg.rank_few_shot) continue;
    bool complete = true;
    for (Metric m : kMetrics) complete = complete && std::isfinite(metric_value(row.metrics, m));
    if (!complete) {
      spdlog::warn("{} left out of ranking: incomplete metrics", row.label());
      continue;
    }
    pool.emplace_back(row.label(), row.metrics);
  }
  if (pool.size() >= 2) inputs.scores = rank_scores(pool);

  emit_report(inputs, formats, run_dir);
  persist_manifest(run_dir);
  return inputs;
}

RunSummary run_benchmark(const RunConfig& cfg) {
  RunSummary summary;
  summary.run_dir = cfg.output_dir;
  fs::create_directories(cfg.output_dir);

  const NormalizedDataset dataset = ingest(cfg.dataset.spec, cfg.dataset.path, cfg.dataset.format);
  EvalSetSummary eval_summary;
  const auto eval_set = build_eval_set(dataset, cfg.dataset.spec, &eval_summary);
  if (eval_set.empty()) throw Error("evaluation set is empty after filtering");
  const auto stats = compute_item_stats(dataset, eval_set);
  if (cfg.eval.k > dataset.universe_size) throw ConfigError("K exceeds the item universe");
  spdlog::info("{}: {} users, {} items, {} interactions", dataset.name, eval_set.size(), dataset.universe_size,
               dataset.interactions.size());

  write_file_atomic(cfg.output_dir / "config.json", config_snapshot(cfg));
  {
    ojson templates;
    for (const auto& t : all_templates()) templates[std::string(t.name)] = sha256_hex(t.text);
    write_file_atomic(cfg.output_dir / "templates.json", templates.dump(2) + "\n");
    ojson info;
    info["name"] = dataset.name;
    info["universe_size"] = dataset.universe_size;
    info["users"] = eval_set.size();
    info["interactions"] = dataset.interactions.size();
    info["catalog_items"] = dataset.catalog.size();
    info["excluded_users"] = eval_summary.excluded_no_remainder;
    write_file_atomic(cfg.output_dir / "dataset.json", info.dump(2) + "\n");
  }
  write_file_atomic(cfg.output_dir / "eval_set.jsonl", eval_set_jsonl(eval_set));
  write_file_atomic(cfg.output_dir / "item_stats.jsonl", item_stats_jsonl(stats));

  RunContext ctx{cfg, dataset, eval_set, stats, summary};
  int order = 0;
  for (const auto& model : cfg.models) {
    std::vector<SequenceMode> modes = cfg.sequence_modes;
    if (model.source == RunSource::external) modes = {model.external_mode};
    for (SequenceMode mode : modes) {
      Slot slot{model.name, mode, model.source, order++, cfg.output_dir / kModelsDir / slot_dir_name(model.name, mode)};
      fs::create_directories(slot.dir);
      write_slot(slot);
      const fs::path responses = slot.dir / "responses.jsonl";
      spdlog::info("running {} ({})", model.name, mode.label());
      std::vector<RecommendationRun> runs;
      switch (model.source) {
        case RunSource::builtin: runs = run_builtin(ctx, model); break;
        case RunSource::llm: runs = run_llm(ctx, model, mode, responses); break;
        case RunSource::external: runs = run_external(ctx, model); break;
      }
      write_responses(responses, canonical_runs(std::move(runs)));
    }
  }

  const ReportFormat formats[] = {ReportFormat::markdown, ReportFormat::csv};
  summary.report = generate_reports(cfg.output_dir, formats);
  return summary;
}

std::size_t export_requests_from_run(const fs::path& run_dir, const fs::path& out, SequenceMode mode) {
  const RunConfig cfg = read_run_config(run_dir);
  return export_requests(read_eval_set(run_dir), cfg.eval.k, mode, out);
}

std::size_t import_recs_into_run(const fs::path& run_dir, const fs::path& file, const std::string& model,
                                 SequenceMode mode) {
  const RunConfig cfg = read_run_config(run_dir);
  const DatasetInfo info = read_dataset_info(run_dir);
  auto imported = import_recommendations(file, info.universe_size, cfg.eval.k);
  std::vector<RecommendationRun> runs;
  for (auto& r : imported.runs) {
    if (r.model == model) runs.push_back(std::move(r));
  }
  if (runs.empty()) throw Error(file.string() + ": no lines for model '" + model + "'");

  const fs::path dir = run_dir / kModelsDir / slot_dir_name(model, mode);
  int order = next_order(run_dir);
  for (const auto& s : read_slots(run_dir)) {
    if (s.dir == dir) order = s.order;
  }
  Slot slot{model, mode, RunSource::external, order, dir};
  fs::create_directories(slot.dir);
  write_slot(slot);
  const std::size_t count = runs.size();
  write_responses(slot.dir / "responses.jsonl", canonical_runs(std::move(runs)));

  const ReportFormat formats[] = {ReportFormat::markdown, ReportFormat::csv};
  generate_reports(run_dir, formats);
  return count;
}

IngestSummary ingest_to_normalized(DatasetFormat format, const fs::path& in, const fs::path& out,
                                   const DatasetSpec& spec) {
  NormalizedDataset raw = load_dataset(in, format, spec.name);
  IngestSummary summary;
  summary.ratings = raw.interactions.size();
  summary.users = raw.user_count();
  summary.items = static_cast<std::size_t>(raw.universe_size);

  NormalizedDataset kept = prepare_dataset(std::move(raw), spec);
  summary.kept_ratings = kept.interactions.size();
  summary.kept_users = kept.user_count();
  std::set<ItemId> items;
  for (const auto& r : kept.interactions) items.insert(r.item);
  summary.kept_items = items.size();
  write_normalized(kept, out);
  return summary;
}

}  // namespace recbench
