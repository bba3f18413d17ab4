#pragma once

// Chat-completion clients used to sample invariants from a language model.

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace invkit {

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LlmConfig {
  std::string base_url = "http://localhost:8000/v1";  // POSTs to <base_url>/chat/completions
  std::string model;
  double temperature = 0.7;
  double top_p = 1.0;
  int max_tokens = 1024;
  std::string api_key_env = "INVKIT_LLM_API_KEY";  // unset variable: no Authorization header
  int max_retries = 4;
  double backoff_initial = 1.0;  // seconds, doubled per retry
  double backoff_max = 30.0;
  double request_timeout = 300.0;
  // Non-empty selects the offline stub reading canned responses from here.
  std::string stub_dir;
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  /// Returns n sampled completions. Throws TransportError.
  virtual std::vector<std::string> complete(const std::string& system, const std::string& user,
                                            int n) const = 0;
};

/// OpenAI-style JSON-over-HTTP endpoint. Connection errors, 429 and 5xx are
/// retried with bounded exponential backoff; other HTTP errors are not.
class HttpLlmClient final : public LlmClient {
 public:
  explicit HttpLlmClient(LlmConfig config);
  std::vector<std::string> complete(const std::string& system, const std::string& user,
                                    int n) const override;

 private:
  LlmConfig config_;
};

/// Offline client. Answers come from `<dir>/<prompt_key>.json`, falling back to
/// `<dir>/default.json`. A file holds a JSON string or an array of strings;
/// arrays are cycled when fewer than n entries exist.
class StubLlmClient final : public LlmClient {
 public:
  explicit StubLlmClient(std::string dir);
  std::vector<std::string> complete(const std::string& system, const std::string& user,
                                    int n) const override;

 private:
  std::string dir_;
};

/// 16 hex digits of the 64-bit FNV-1a hash of system + "\n" + user.
std::string prompt_key(const std::string& system, const std::string& user);

std::unique_ptr<LlmClient> make_llm_client(const LlmConfig& config);

/// One-shot convenience over make_llm_client. Throws TransportError.
std::vector<std::string> llm_complete(const LlmConfig& config, const std::string& system,
                                      const std::string& user, int n);

}  // namespace invkit
