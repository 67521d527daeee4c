#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "recbench/adapters.hpp"
#include "recbench/error.hpp"

namespace recbench {
namespace {

struct ParsedUrl {
  std::string scheme_host_port;
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint URL needs a scheme: " + url);
  const auto path_begin = url.find('/', scheme_end + 3);
  ParsedUrl parsed;
  parsed.scheme_host_port = url.substr(0, path_begin);
  std::string path = path_begin == std::string::npos ? std::string() : url.substr(path_begin);
  while (!path.empty() && path.back() == '/') path.pop_back();
  if (!path.ends_with("/chat/completions")) path += "/chat/completions";
  parsed.path = path;
  return parsed;
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

std::chrono::milliseconds backoff_for(const EndpointConfig& cfg, int attempt,
                                      const httplib::Result& res) {
  std::chrono::milliseconds delay = cfg.initial_backoff * (1LL << std::min(attempt, 20));
  if (res && res->has_header("Retry-After")) {
    char* end = nullptr;
    const std::string value = res->get_header_value("Retry-After");
    const double seconds = std::strtod(value.c_str(), &end);
    if (end != value.c_str() && seconds >= 0) {
      delay = std::max(delay, std::chrono::milliseconds(static_cast<long long>(seconds * 1000)));
    }
  }
  return std::min<std::chrono::milliseconds>(delay, cfg.max_backoff);
}

// First choice's message content; nullopt when the body is not a chat completion.
std::optional<std::string> response_content(const std::string& body) {
  try {
    const auto obj = nlohmann::json::parse(body);
    const auto& content = obj.at("choices").at(0).at("message").at("content");
    if (content.is_null()) return std::string();
    return content.get<std::string>();
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

}  // namespace

std::string chat_request_body(const EndpointConfig& cfg, const RenderedPrompt& prompt) {
  nlohmann::ordered_json body;
  body["model"] = cfg.model_name;
  nlohmann::ordered_json message;
  message["role"] = "user";
  message["content"] = prompt.text;
  body["messages"] = nlohmann::ordered_json::array({message});
  body["temperature"] = cfg.temperature;
  return body.dump();
}

RecommendationRun chat_complete(const EndpointConfig& cfg, const RenderedPrompt& prompt, int run) {
  if (prompt.text.empty()) throw Error("chat_complete: empty prompt");

  RecommendationRun result;
  result.user = prompt.user;
  result.run = run;
  result.source = RunSource::llm;
  result.model = cfg.model_name;

  httplib::Headers headers;
  if (!cfg.api_key_env.empty()) {
    const char* key = std::getenv(cfg.api_key_env.c_str());
    if (!key || !*key) {
      throw AuthError("environment variable " + cfg.api_key_env + " is not set; export the API key for " +
                      cfg.model_name + " before running");
    }
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  const ParsedUrl url = parse_url(cfg.base_url);
  const std::string body = chat_request_body(cfg, prompt);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(cfg.timeout_seconds));

  httplib::Client client(url.scheme_host_port);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    const auto start = std::chrono::steady_clock::now();
    httplib::Result res = client.Post(url.path, headers, body, "application/json");
    const auto stop = std::chrono::steady_clock::now();

    if (res && (res->status == 401 || res->status == 403)) {
      throw AuthError(cfg.model_name + ": endpoint rejected credentials (HTTP " +
                      std::to_string(res->status) + "); check " +
                      (cfg.api_key_env.empty() ? std::string("the endpoint configuration")
                                               : "$" + cfg.api_key_env));
    }
    if (res && res->status >= 200 && res->status < 300) {
      if (auto content = response_content(res->body)) {
        result.raw_text = std::move(*content);
        result.elapsed_seconds = std::chrono::duration<double>(stop - start).count();
        return result;
      }
      result.error = "malformed chat completion response";
      break;
    }
    if (res && !retryable_status(res->status)) {
      result.error = "HTTP " + std::to_string(res->status);
      break;
    }
    result.error = res ? "HTTP " + std::to_string(res->status) : "transport: " + httplib::to_string(res.error());
    if (attempt < cfg.max_retries) {
      const auto delay = backoff_for(cfg, attempt, res);
      spdlog::debug("{} user {} run {}: {} (attempt {}), retrying in {} ms", cfg.model_name,
                    prompt.user, run, result.error, attempt + 1, delay.count());
      std::this_thread::sleep_for(delay);
    }
  }

  result.failed = true;
  spdlog::warn("{} user {} run {} failed: {}", cfg.model_name, prompt.user, run, result.error);
  return result;
}

}  // namespace recbench
