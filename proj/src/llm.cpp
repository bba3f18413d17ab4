#include "invkit/llm.hpp"

#include <httplib.h>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

namespace invkit {

using nlohmann::json;

namespace {

struct Endpoint {
  std::string scheme_host_port;
  std::string path;
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw TransportError("base URL needs a scheme: " + url);
  const auto path_begin = url.find('/', scheme_end + 3);
  Endpoint e;
  e.scheme_host_port = url.substr(0, path_begin);
  std::string prefix = path_begin == std::string::npos ? "" : url.substr(path_begin);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  e.path = prefix + "/chat/completions";
  return e;
}

bool retryable(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

HttpLlmClient::HttpLlmClient(LlmConfig config) : config_(std::move(config)) {}

std::vector<std::string> HttpLlmClient::complete(const std::string& system, const std::string& user,
                                                 int n) const {
  const Endpoint endpoint = split_url(config_.base_url);
  httplib::Client client(endpoint.scheme_host_port);
  const auto secs = static_cast<time_t>(config_.request_timeout);
  client.set_connection_timeout(std::min<time_t>(secs, 30));
  client.set_read_timeout(secs);
  client.set_write_timeout(secs);

  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  std::vector<std::string> out;
  // Some servers ignore or cap `n`; keep asking until enough choices arrive.
  while (static_cast<int>(out.size()) < n) {
    json body = {
        {"model", config_.model},
        {"messages", json::array({{{"role", "system"}, {"content", system}},
                                  {{"role", "user"}, {"content", user}}})},
        {"temperature", config_.temperature},
        {"top_p", config_.top_p},
        {"max_tokens", config_.max_tokens},
        {"n", n - static_cast<int>(out.size())},
    };
    const std::string payload = body.dump();

    double delay = config_.backoff_initial;
    std::string last_error;
    bool done = false;
    for (int attempt = 0; attempt <= config_.max_retries && !done; ++attempt) {
      if (attempt > 0) {
        spdlog::warn("llm request failed ({}), retry {} in {:.1f}s", last_error, attempt, delay);
        std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        delay = std::min(delay * 2, config_.backoff_max);
      }
      auto res = client.Post(endpoint.path, headers, payload, "application/json");
      if (!res) {
        last_error = httplib::to_string(res.error());
        continue;
      }
      if (res->status != 200) {
        last_error = "HTTP " + std::to_string(res->status);
        if (!retryable(res->status)) throw TransportError(last_error + ": " + res->body);
        continue;
      }
      try {
        const json reply = json::parse(res->body);
        const auto& choices = reply.at("choices");
        if (choices.empty()) throw TransportError("response has no choices");
        for (const auto& choice : choices) {
          const auto& content = choice.at("message").at("content");
          out.push_back(content.is_string() ? content.get<std::string>() : std::string());
        }
      } catch (const json::exception& e) {
        throw TransportError(std::string("malformed completion payload: ") + e.what());
      }
      done = true;
    }
    if (!done) throw TransportError("giving up after retries: " + last_error);
  }
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string prompt_key(const std::string& system, const std::string& user) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  mix(system);
  mix("\n");
  mix(user);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

StubLlmClient::StubLlmClient(std::string dir) : dir_(std::move(dir)) {}

std::vector<std::string> StubLlmClient::complete(const std::string& system, const std::string& user,
                                                 int n) const {
  namespace fs = std::filesystem;
  fs::path file = fs::path(dir_) / (prompt_key(system, user) + ".json");
  if (!fs::exists(file)) file = fs::path(dir_) / "default.json";
  std::ifstream in(file);
  if (!in) throw TransportError("stub has no response for prompt " + prompt_key(system, user));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw TransportError("bad stub file " + file.string() + ": " + e.what());
  }
  std::vector<std::string> answers;
  if (doc.is_string()) {
    answers.push_back(doc.get<std::string>());
  } else if (doc.is_array()) {
    for (const auto& item : doc) {
      if (!item.is_string()) throw TransportError("stub entries must be strings: " + file.string());
      answers.push_back(item.get<std::string>());
    }
  }
  if (answers.empty()) throw TransportError("empty stub file " + file.string());
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(answers[static_cast<std::size_t>(i) % answers.size()]);
  return out;
}

std::unique_ptr<LlmClient> make_llm_client(const LlmConfig& config) {
  if (!config.stub_dir.empty()) return std::make_unique<StubLlmClient>(config.stub_dir);
  return std::make_unique<HttpLlmClient>(config);
}

std::vector<std::string> llm_complete(const LlmConfig& config, const std::string& system,
                                      const std::string& user, int n) {
  return make_llm_client(config)->complete(system, user, n);
}

}  // namespace invkit
