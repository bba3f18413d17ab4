#pragma once

// The V0 -> V1 -> V2 dataset pipeline and its JSONL persistence.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "invkit/errors.hpp"
#include "invkit/normalize.hpp"
#include "invkit/parallel.hpp"
#include "invkit/simplify.hpp"

namespace invkit {

struct RawInstance {
  std::string id;
  std::string program_text;  // with loop markers and its own assertion (q)
  std::vector<Property> preconditions;
  std::string marker;
  std::string raw_invariant;  // V0 text as the verifier emitted it
  std::optional<double> t_b;  // measured with the backend when absent
};

/// Reads raw-instance JSONL. Each line has `id`, `program` and either
/// `marker` + `raw_invariant` or `invariants: [{marker, raw_invariant}, ...]`;
/// the latter expands to one instance per marker. Optional: `t_b`,
/// `preconditions: [{location, predicate}]`. Throws SchemaError.
std::vector<RawInstance> load_raw_instances(const std::string& path);
std::vector<RawInstance> parse_raw_instances(std::string_view jsonl);

enum class Stage { V0, V1, V2 };
std::string_view to_string(Stage stage);

struct CuratedSample {
  std::string id;
  Stage stage = Stage::V0;
  std::string program_text;
  std::string marker;
  std::string invariant_text;   // raw text for V0, minimal printing otherwise
  std::optional<int> grade;     // V2 only
  double t_b = 0.0;
  std::optional<double> t1, t2, t_v;  // V2 only
  std::size_t char_length = 0;        // characters of invariant_text
  std::size_t num_disjuncts = 0;
  std::optional<std::string> source_rationale;
  std::optional<NormalizationReport> normalization;  // V1 only

  bool operator==(const CuratedSample&) const = default;
};

nlohmann::ordered_json to_json(const NormalizationReport& report);
nlohmann::ordered_json to_json(const CuratedSample& sample);
/// Validates the schema and the sample invariants; throws SchemaError with the
/// given line number.
CuratedSample sample_from_json(const nlohmann::json& j, std::size_t line = 0);

void emit_jsonl(const std::vector<CuratedSample>& samples, const std::string& path);
std::string to_jsonl(const std::vector<CuratedSample>& samples);
std::vector<CuratedSample> load_jsonl(const std::string& path);
std::vector<CuratedSample> parse_jsonl(std::string_view jsonl);

struct CurateConfig {
  int n_candidates = 4;
  std::size_t verbosity_threshold = 64;
  GradeOptions grade;
  int baseline_runs = 3;  // k
};

struct CurateOutcome {
  std::vector<CuratedSample> samples;  // V0, V1, then V2 records
  std::string skip_reason;             // non-empty when the instance produced nothing
  SimplifyStats simplify;
};

/// Runs one instance through the pipeline. Never throws: problems end up in
/// skip_reason.
CurateOutcome curate_instance(const RawInstance& raw, const CurateConfig& config,
                              const LlmClient& llm, const OracleBackend& backend);

struct Distribution {
  std::size_t count = 0;
  double min = 0, median = 0, mean = 0, max = 0;  // median: lower middle
};
Distribution describe(std::vector<double> values);

struct StatsReport {
  std::size_t total = 0;
  std::map<std::string, std::size_t> per_stage;
  std::map<int, std::size_t> per_grade;
  Distribution char_length;
  std::map<std::string, Distribution> char_length_per_stage;
  Distribution speedup;  // t_b / t_v over grade-3 samples
};

StatsReport dataset_stats(const std::vector<CuratedSample>& samples);
nlohmann::ordered_json to_json(const StatsReport& report);
std::string format_stats(const StatsReport& report);

struct DataSplit {
  std::vector<std::string> train;
  std::vector<std::string> validation;
};

/// Seeded shuffle of the distinct ids (sorted first), first 80% to train.
DataSplit split_ids(std::vector<std::string> ids, std::uint64_t seed, double train_fraction = 0.8);

struct CurationSummary {
  std::size_t instances = 0;
  std::size_t skipped = 0;
  std::size_t v0 = 0, v1 = 0, v2 = 0;
};

/// Curates all instances on `workers` threads and writes v0/v1/v2.jsonl and
/// manifest.json into out_dir. Output order follows input order, so the
/// files do not depend on scheduling.
CurationSummary run_curation(const std::vector<RawInstance>& instances, const CurateConfig& config,
                             const LlmClient& llm, const OracleBackend& backend,
                             const std::string& out_dir, std::uint64_t seed, int workers,
                             const nlohmann::ordered_json& config_snapshot = {});

}  // namespace invkit
