#pragma once

// Evaluation harness: ask a model for an invariant, check it with the split
// procedure and aggregate the portfolio metrics.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "invkit/llm.hpp"
#include "invkit/prompts.hpp"
#include "invkit/verify.hpp"

namespace invkit {

struct EvalInstance {
  std::string id;
  std::string program_text;  // markers and the assertion q are in the source
  std::string marker;
  std::vector<Property> preconditions;
  std::optional<double> t_b;  // median baseline; measured when absent
  bool baseline_timed_out = false;
};

/// JSONL with `id`, `program`, `marker` and optional `t_b`,
/// `baseline_timed_out`, `preconditions`. Throws SchemaError.
std::vector<EvalInstance> parse_eval_instances(std::string_view jsonl);
std::vector<EvalInstance> load_eval_instances(const std::string& path);

PromptPair build_generation_prompt(const EvalInstance& instance);

struct ParsedGeneration {
  PredExpr predicate;  // null when invalid
  std::string error;
  bool valid() const { return predicate != nullptr; }
};

/// Accepts a fenced or bare JSON object with exactly the keys "marker" and
/// "content", the marker equal to `expected_marker`, and content that parses
/// as a side-effect-free predicate. Anything else is invalid.
ParsedGeneration parse_generation_response(std::string_view text, std::string_view expected_marker);

struct ModelAnswer {
  std::string output;
  double t_m = 0.0;  // inference seconds
};

/// Where invariant proposals come from.
class ModelSource {
 public:
  virtual ~ModelSource() = default;
  /// Throws TransportError when no answer can be produced.
  virtual ModelAnswer generate(const EvalInstance& instance) const = 0;
};

/// Queries a chat model with the generation prompt and clocks the call.
class LlmModelSource final : public ModelSource {
 public:
  explicit LlmModelSource(const LlmClient& client) : client_(client) {}
  ModelAnswer generate(const EvalInstance& instance) const override;

 private:
  const LlmClient& client_;
};

/// Pre-generated outputs keyed by instance id.
class ReplayModelSource final : public ModelSource {
 public:
  explicit ReplayModelSource(std::map<std::string, ModelAnswer> answers) : answers_(std::move(answers)) {}
  /// JSONL lines `{"id", "output", "t_m"}`. Throws SchemaError.
  static ReplayModelSource parse(std::string_view jsonl);
  static ReplayModelSource load(const std::string& path);
  ModelAnswer generate(const EvalInstance& instance) const override;

 private:
  std::map<std::string, ModelAnswer> answers_;
};

struct EvalRecord {
  std::string id;
  std::string raw_output;
  std::optional<std::string> invariant;  // minimal printing when valid
  double t_m = 0.0;
  bool valid = false;
  bool correct = false;
  bool speedup = false;
  Outcome outcome = Outcome::Unknown;
  std::optional<Outcome> v1, v2;  // absent when no verifier ran
  double t1 = 0.0, t2 = 0.0, t_v = 0.0;
  double t_b = 0.0;
  bool baseline_timed_out = false;
  double speedup_factor = 1.0;  // S_i
  double vbs = 0.0;
  std::string diagnostic;

  bool conclusive() const { return outcome != Outcome::Unknown; }
};

nlohmann::ordered_json to_json(const EvalRecord& record);

/// Runs one instance. instance.t_b must be set. Invalid proposals never reach
/// the verifier.
///   Correct  = Valid and v1 TRUE
///   Speedup  = Correct, outcome TRUE/FALSE, and t_v < t_b
///   S_i      = t_b / t_v when Correct and conclusive, else 1
///   vbs_i    = min(t_v, t_b) when Correct and conclusive, else t_b
EvalRecord evaluate_instance(const EvalInstance& instance, const OracleBackend& backend,
                             const ModelSource& model, double timeout);

struct MetricsReport {
  std::size_t n = 0;
  double r_valid = 0, r_correct = 0, r_speedup = 0;  // percentages
  std::optional<double> mean_speedup;                 // over Speedup records
  double vbp = 0;
  std::optional<double> vbp_e2e;  // with model latency added to the split arm
  double mean_t_b = 0;
  std::size_t baseline_timeouts = 0;
  std::size_t solved_timeouts = 0;  // baseline timed out, outcome conclusive
};

/// Order of records does not matter: sums are taken over sorted values.
MetricsReport compute_metrics(const std::vector<EvalRecord>& records, bool include_latency = true);

/// Fields rounded to 1e-6 so reruns produce identical bytes.
nlohmann::ordered_json to_json(const MetricsReport& report);
std::string format_metrics(const MetricsReport& report);

/// Hard iff t_b > threshold.
std::pair<std::vector<std::string>, std::vector<std::string>> partition_easy_hard(
    const std::vector<std::pair<std::string, double>>& baseline_times, double threshold = 15.0);

struct EvalRunOptions {
  double timeout = 600.0;
  int baseline_runs = 3;  // k, for instances without t_b
  int workers = 1;
};

/// Evaluates every instance (input order is kept in the result). Instances
/// lacking t_b get a baseline measurement first.
std::vector<EvalRecord> run_evaluation(std::vector<EvalInstance> instances, const OracleBackend& backend,
                                       const ModelSource& model, const EvalRunOptions& options);

/// Writes records.jsonl, metrics.json and, if asked, timings.csv.
void write_evaluation(const std::vector<EvalRecord>& records, const MetricsReport& metrics,
                      const std::string& out_dir, bool csv);

}  // namespace invkit
