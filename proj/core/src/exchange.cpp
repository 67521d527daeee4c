// Exchange-file boundary with external recommenders.

#include <algorithm>
#include <fstream>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "recbench/adapters.hpp"
#include "recbench/error.hpp"

namespace recbench {

std::size_t export_requests(const std::vector<UserSequence>& eval_set, int k, SequenceMode mode,
                            const std::filesystem::path& path) {
  if (eval_set.empty()) throw Error("export_requests: empty evaluation set");
  std::vector<const UserSequence*> sorted;
  for (const auto& s : eval_set) sorted.push_back(&s);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto* a, const auto* b) { return a->user < b->user; });

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto* seq : sorted) {
    nlohmann::ordered_json line;
    line["user"] = seq->user;
    line["history"] = apply_sequence_mode(seq->history, mode);
    line["k"] = k;
    line["mode"] = mode.label();
    out << line.dump() << '\n';
  }
  out.flush();
  if (!out) throw Error("write failed: " + path.string());
  return sorted.size();
}

ImportedRecommendations import_recommendations(const std::filesystem::path& path,
                                               ItemId universe_size, int k) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");

  ImportedRecommendations result;
  std::set<std::tuple<std::string, UserId, int>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    RecommendationRun run;
    run.source = RunSource::external;
    try {
      const auto obj = nlohmann::json::parse(line);
      run.user = obj.at("user").get<UserId>();
      run.run = obj.at("run").get<int>();
      run.items = obj.at("items").get<std::vector<RawId>>();
      run.elapsed_seconds = obj.at("elapsed_s").get<double>();
      run.model = obj.at("model").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
    if (run.user < 1 || run.run < 1 || !(run.elapsed_seconds >= 0.0)) {
      throw ParseError(path.string(), line_no, "user and run must be positive, elapsed_s non-negative");
    }
    if (!seen.emplace(run.model, run.user, run.run).second) {
      throw ParseError(path.string(), line_no,
                       "duplicate (user " + std::to_string(run.user) + ", run " +
                           std::to_string(run.run) + ")");
    }
    result.lists.push_back(validate_ids(run.items, universe_size, k, run.user, run.run));
    result.runs.push_back(std::move(run));
  }
  return result;
}

}  // namespace recbench
