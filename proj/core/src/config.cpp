#include "recbench/config.hpp"

#include <set>

#include <nlohmann/json.hpp>

#include "recbench/artifacts.hpp"
#include "recbench/error.hpp"

namespace recbench {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void reject_unknown_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == key;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + std::string(where));
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad type for '" + std::string(key) + "' in " + std::string(where));
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

ModelConfig parse_model(const json& obj, std::size_t index, const fs::path& base, PromptMode default_mode) {
  const std::string where = "models[" + std::to_string(index) + "]";
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  ModelConfig model;
  model.prompt_mode = default_mode;
  model.name = get_or<std::string>(obj, "name", "", where);
  if (model.name.empty()) throw ConfigError(where + ": missing 'name'");
  model.source = parse_run_source(get_or<std::string>(obj, "type", "", where));

  switch (model.source) {
    case RunSource::llm: {
      reject_unknown_keys(obj, where, {"name", "type", "model", "base_url", "api_key_env", "temperature",
                                       "timeout_s", "max_retries", "max_in_flight", "initial_backoff_ms",
                                       "max_backoff_ms", "prompt_mode"});
      auto& ep = model.endpoint;
      ep.model_name = get_or<std::string>(obj, "model", model.name, where);
      ep.base_url = get_or<std::string>(obj, "base_url", "", where);
      if (ep.base_url.empty()) throw ConfigError(where + ": llm models need 'base_url'");
      ep.api_key_env = get_or<std::string>(obj, "api_key_env", "", where);
      ep.temperature = get_or<double>(obj, "temperature", 0.0, where);
      ep.timeout_seconds = get_or<double>(obj, "timeout_s", 60.0, where);
      ep.max_retries = get_or<int>(obj, "max_retries", 3, where);
      ep.max_in_flight = get_or<int>(obj, "max_in_flight", 4, where);
      ep.initial_backoff = std::chrono::milliseconds(get_or<int>(obj, "initial_backoff_ms", 500, where));
      ep.max_backoff = std::chrono::milliseconds(get_or<int>(obj, "max_backoff_ms", 30000, where));
      if (ep.max_in_flight < 1) throw ConfigError(where + ": max_in_flight must be >= 1");
      if (ep.max_retries < 0) throw ConfigError(where + ": max_retries must be >= 0");
      if (!(ep.timeout_seconds > 0)) throw ConfigError(where + ": timeout_s must be positive");
      if (auto it = obj.find("prompt_mode"); it != obj.end()) {
        model.prompt_mode = parse_prompt_mode(get_or<std::string>(obj, "prompt_mode", "", where));
      }
      break;
    }
    case RunSource::builtin:
      reject_unknown_keys(obj, where, {"name", "type", "kind"});
      model.builtin = parse_builtin_kind(get_or<std::string>(obj, "kind", "popularity", where));
      break;
    case RunSource::external: {
      reject_unknown_keys(obj, where, {"name", "type", "file", "mode"});
      const auto file = get_or<std::string>(obj, "file", "", where);
      if (file.empty()) throw ConfigError(where + ": external models need 'file'");
      model.file = resolve(base, file);
      model.external_mode = parse_sequence_mode(get_or<std::string>(obj, "mode", "full", where));
      break;
    }
  }
  return model;
}

}  // namespace

RunConfig validate_config(std::string_view text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown_keys(doc, "config", {"dataset", "models", "eval", "prompt", "sequence_modes", "seed",
                                      "output_dir", "rank_few_shot"});

  RunConfig cfg;
  auto ds = doc.find("dataset");
  if (ds == doc.end()) throw ConfigError("missing 'dataset' section");
  reject_unknown_keys(*ds, "dataset", {"name", "format", "path", "min_interactions", "max_seq_len", "split_ratio"});
  cfg.dataset.format = parse_dataset_format(get_or<std::string>(*ds, "format", "normalized", "dataset"));
  const auto path = get_or<std::string>(*ds, "path", "", "dataset");
  if (path.empty()) throw ConfigError("missing dataset path");
  cfg.dataset.path = resolve(base_dir, path);
  const DatasetSpec defaults = default_spec(cfg.dataset.format);
  auto& spec = cfg.dataset.spec;
  spec.name = get_or<std::string>(*ds, "name", defaults.name, "dataset");
  spec.min_interactions = get_or<int>(*ds, "min_interactions", defaults.min_interactions, "dataset");
  spec.max_seq_len = get_or<int>(*ds, "max_seq_len", defaults.max_seq_len, "dataset");
  spec.split_ratio = get_or<double>(*ds, "split_ratio", defaults.split_ratio, "dataset");
  if (spec.min_interactions < 1) throw ConfigError("dataset.min_interactions must be >= 1");
  if (spec.max_seq_len < 1) throw ConfigError("dataset.max_seq_len must be >= 1");
  if (!(spec.split_ratio > 0.0 && spec.split_ratio < 1.0)) throw ConfigError("dataset.split_ratio must be in (0,1)");

  if (auto ev = doc.find("eval"); ev != doc.end()) {
    reject_unknown_keys(*ev, "eval", {"k", "repetitions"});
    cfg.eval.k = get_or<int>(*ev, "k", 5, "eval");
    cfg.eval.repetitions = get_or<int>(*ev, "repetitions", 10, "eval");
  }
  if (cfg.eval.k < 1) throw ConfigError("eval.k must be >= 1");
  if (cfg.eval.repetitions < 1) throw ConfigError("eval.repetitions must be >= 1");

  if (auto pr = doc.find("prompt"); pr != doc.end()) {
    reject_unknown_keys(*pr, "prompt", {"mode"});
    cfg.prompt.mode = parse_prompt_mode(get_or<std::string>(*pr, "mode", "augmented", "prompt"));
  }
  cfg.prompt.recommendation_length = cfg.eval.k;
  cfg.prompt.dataset_name = spec.name;

  if (auto sm = doc.find("sequence_modes"); sm != doc.end()) {
    if (!sm->is_array() || sm->empty()) throw ConfigError("sequence_modes must be a non-empty array");
    cfg.sequence_modes.clear();
    std::set<int> seen;
    for (const auto& m : *sm) {
      if (!m.is_string()) throw ConfigError("sequence_modes entries must be strings");
      SequenceMode mode = parse_sequence_mode(m.get<std::string>());
      if (!seen.insert(mode.few_shot).second) throw ConfigError("duplicate sequence mode " + mode.label());
      cfg.sequence_modes.push_back(mode);
    }
  }

  cfg.seed = get_or<std::uint64_t>(doc, "seed", 42, "config");
  cfg.output_dir = resolve(base_dir, get_or<std::string>(doc, "output_dir", "runs/latest", "config"));
  cfg.rank_few_shot = get_or<bool>(doc, "rank_few_shot", false, "config");

  auto models = doc.find("models");
  if (models == doc.end() || !models->is_array() || models->empty()) throw ConfigError("no models configured");
  std::set<std::string> names;
  for (std::size_t i = 0; i < models->size(); ++i) {
    ModelConfig model = parse_model((*models)[i], i, base_dir, cfg.prompt.mode);
    if (!names.insert(model.name).second) throw ConfigError("duplicate model name '" + model.name + "'");
    cfg.models.push_back(std::move(model));
  }
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error&) {
    throw ConfigError("cannot read config file " + path.string());
  }
  return validate_config(text, fs::absolute(path).parent_path());
}

std::string config_snapshot(const RunConfig& cfg) {
  nlohmann::ordered_json doc;
  auto& ds = doc["dataset"];
  ds["name"] = cfg.dataset.spec.name;
  ds["format"] = std::string(to_string(cfg.dataset.format));
  ds["path"] = cfg.dataset.path.generic_string();
  ds["min_interactions"] = cfg.dataset.spec.min_interactions;
  ds["max_seq_len"] = cfg.dataset.spec.max_seq_len;
  ds["split_ratio"] = cfg.dataset.spec.split_ratio;
  doc["eval"]["k"] = cfg.eval.k;
  doc["eval"]["repetitions"] = cfg.eval.repetitions;
  doc["prompt"]["mode"] = std::string(to_string(cfg.prompt.mode));
  doc["sequence_modes"] = nlohmann::ordered_json::array();
  for (const auto& m : cfg.sequence_modes) doc["sequence_modes"].push_back(m.label());
  doc["seed"] = cfg.seed;
  doc["output_dir"] = cfg.output_dir.generic_string();
  doc["rank_few_shot"] = cfg.rank_few_shot;
  doc["models"] = nlohmann::ordered_json::array();
  for (const auto& m : cfg.models) {
    nlohmann::ordered_json entry;
    entry["name"] = m.name;
    entry["type"] = std::string(to_string(m.source));
    switch (m.source) {
      case RunSource::llm:
        entry["model"] = m.endpoint.model_name;
        entry["base_url"] = m.endpoint.base_url;
        entry["api_key_env"] = m.endpoint.api_key_env;
        entry["temperature"] = m.endpoint.temperature;
        entry["timeout_s"] = m.endpoint.timeout_seconds;
        entry["max_retries"] = m.endpoint.max_retries;
        entry["max_in_flight"] = m.endpoint.max_in_flight;
        entry["initial_backoff_ms"] = m.endpoint.initial_backoff.count();
        entry["max_backoff_ms"] = m.endpoint.max_backoff.count();
        entry["prompt_mode"] = std::string(to_string(m.prompt_mode));
        break;
      case RunSource::builtin:
        entry["kind"] = std::string(to_string(m.builtin));
        break;
      case RunSource::external:
        entry["file"] = m.file.generic_string();
        entry["mode"] = m.external_mode.label();
        break;
    }
    doc["models"].push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

}  // namespace recbench
