#pragma once

// Verification backend that shells out to an external verifier.

#include <regex>
#include <stdexcept>
#include <string>

#include "invkit/verify.hpp"

namespace invkit {

class SpawnFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExternalBackendConfig {
  // Shell command; every `{file}` is replaced by the quoted path of the query.
  std::string command;
  double timeout = 600.0;
  // Matched per output line; the last line matching any of them decides.
  // The defaults recognise the verdict line printed by Ultimate Automizer.
  std::string true_regex = R"(^\s*TRUE\s*$)";
  std::string false_regex = R"(^\s*FALSE(\(.*\))?\s*$)";
  std::string unknown_regex = R"(^\s*(UNKNOWN|ERROR).*$)";
  // Prepended to the command, e.g. "prlimit --as=17179869184".
  std::string memory_limit_wrapper;
  bool keep_artifacts = false;
  std::string artifact_dir;  // default: the system temp directory
};

class ExternalBackend final : public OracleBackend {
 public:
  /// Throws std::invalid_argument if the command has no `{file}` placeholder
  /// or a regex does not compile.
  explicit ExternalBackend(ExternalBackendConfig config);

  OracleResult check(const std::string& source, double timeout) const override;
  std::string name() const override { return "external"; }
  const ExternalBackendConfig& config() const noexcept { return config_; }

  /// Applies the verdict regexes to a verifier transcript.
  Outcome classify(const std::string& output, bool& matched) const;

 private:
  ExternalBackendConfig config_;
  std::regex true_re_;
  std::regex false_re_;
  std::regex unknown_re_;
};

/// Runs the configured verifier on `source`. Same as ExternalBackend::check.
OracleResult external_check(const ExternalBackendConfig& config, const std::string& source,
                            double timeout);

}  // namespace invkit
