#pragma once

// Configuration and subcommands behind the `invkit` executable.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "invkit/external.hpp"
#include "invkit/llm.hpp"
#include "invkit/minic.hpp"

namespace invkit {

struct ToolConfig {
  std::string backend = "builtin";  // "builtin" or "external"
  ExternalBackendConfig external;
  TimeModel time_model = TimeModel::Wall;
  double step_seconds = 1e-6;
  LlmConfig llm;
  std::size_t verbosity_threshold = 64;  // η, characters
  int n_candidates = 4;                  // N
  double timeout = 600.0;
  int baseline_runs = 3;  // k
  int grading_runs = 1;
  double hard_threshold = 15.0;
  int workers = 1;
  std::string output_dir = "invkit-out";
  std::uint64_t seed = 0;
  bool csv = true;

  /// Throws std::invalid_argument on a non-positive knob or unknown backend.
  void validate() const;
};

/// Names of the settable keys, e.g. "timeout", "external.command", "llm.model".
std::vector<std::string> config_keys();

/// Sets one key from its textual value. Throws std::invalid_argument for an
/// unknown key or a malformed value.
void set_config_value(ToolConfig& config, std::string_view key, std::string_view value);

/// Applies a JSON config file. Nested objects are flattened with dots, so
/// {"llm": {"model": "m"}} sets "llm.model".
void apply_config_json(ToolConfig& config, const nlohmann::json& doc);
void apply_config_file(ToolConfig& config, const std::string& path);

/// "external.command" -> "INVKIT_EXTERNAL_COMMAND".
std::string env_var_name(std::string_view key);

/// Applies every INVKIT_* variable that names a key. `lookup` defaults to getenv.
void apply_environment(ToolConfig& config,
                       const std::function<std::optional<std::string>(const std::string&)>& lookup = {});

/// Builds the effective configuration: defaults, then the config file (if any),
/// then the environment, then `overrides` (the explicit command-line values).
ToolConfig resolve_config(const std::optional<std::string>& config_file,
                          const std::map<std::string, std::string>& overrides,
                          const std::function<std::optional<std::string>(const std::string&)>& lookup = {});

/// Snapshot for manifests. The API key itself is never part of the config.
nlohmann::ordered_json to_json(const ToolConfig& config);

std::unique_ptr<OracleBackend> make_backend(const ToolConfig& config);

struct NormalizeSummary {
  std::size_t lines = 0;
  std::size_t normalized = 0;
  std::size_t skipped = 0;
  std::map<std::string, std::size_t> rules_fired;
  std::size_t casts_stripped = 0;
  std::vector<std::string> skip_messages;
};

/// Input: one raw invariant per line, either plain text, a JSON string, or a
/// JSON object with `invariant` (or `raw_invariant`) and an optional `id`.
/// Writes one V1 JSON object per normalized line. Unparseable lines are
/// skipped and counted. Throws std::runtime_error if the input is unreadable.
NormalizeSummary cmd_normalize(const std::string& in_path, const std::string& out_path);
std::string format_normalize_summary(const NormalizeSummary& summary);

/// Runs the curation pipeline over raw-instance JSONL into config.output_dir.
/// Returns the number of skipped instances.
std::size_t cmd_curate(const ToolConfig& config, const std::string& instances_path);

/// Grades candidates (`{id, invariant[, marker]}` JSONL) against instances in
/// the evaluation format; writes grades.jsonl into config.output_dir. Returns
/// the number of candidates that could not be graded.
std::size_t cmd_grade(const ToolConfig& config, const std::string& instances_path,
                      const std::string& invariants_path);

/// Runs the evaluation harness. With `from_file`, outputs are replayed from
/// that JSONL instead of querying the model. Writes records.jsonl,
/// metrics.json and timings.csv into config.output_dir and returns the
/// human-readable report.
std::string cmd_evaluate(const ToolConfig& config, const std::string& instances_path,
                         const std::optional<std::string>& from_file);

/// Report for a curated JSONL file; JSON when `as_json`.
std::string cmd_stats(const std::string& dataset_path, bool as_json);

}  // namespace invkit
