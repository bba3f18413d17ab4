#pragma once

#include <atomic>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "invkit/llm.hpp"

namespace invkit::testing {

/// Answers every request with the same list of replies and records the last
/// prompt it saw.
class ListLlm final : public LlmClient {
 public:
  explicit ListLlm(std::vector<std::string> replies) : replies_(std::move(replies)) {}
  std::vector<std::string> complete(const std::string& system, const std::string& user,
                                    int n) const override {
    std::lock_guard lock(mutex_);
    ++calls;
    last_system = system;
    last_user = user;
    last_n = n;
    return replies_;
  }
  mutable int calls = 0;
  mutable int last_n = 0;
  mutable std::string last_system;
  mutable std::string last_user;

 private:
  std::vector<std::string> replies_;
  mutable std::mutex mutex_;
};

class DownLlm final : public LlmClient {
 public:
  std::vector<std::string> complete(const std::string&, const std::string&, int) const override {
    throw TransportError("connection refused");
  }
};

inline std::string simplify_reply(const std::string& invariant, const std::string& rationale = "r") {
  return nlohmann::json{{"simplified_invariant", invariant}, {"rationale", rationale}}.dump();
}

}  // namespace invkit::testing
