#include "invkit/curate.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "invkit/errors.hpp"
#include "jsonl.hpp"

namespace invkit {

using nlohmann::json;
using nlohmann::ordered_json;
using namespace detail;

namespace {

template <typename T>
json nullable(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

ordered_json metrics_json(const ExprMetrics& m) {
  return {{"char_length", m.char_length}, {"num_conjuncts", m.num_conjuncts}, {"num_disjuncts", m.num_disjuncts}};
}

ExprMetrics metrics_from_json(const json& j, std::size_t line) {
  return {require_count(j, "char_length", line), require_count(j, "num_conjuncts", line),
          require_count(j, "num_disjuncts", line)};
}

ordered_json report_json(const NormalizationReport& r) {
  ordered_json rules = ordered_json::object();
  for (const auto& [name, count] : r.rules_fired) rules[name] = count;
  return {{"input", metrics_json(r.input_metrics)},
          {"output", metrics_json(r.output_metrics)},
          {"rules_fired", rules},
          {"casts_stripped", r.casts_stripped}};
}

NormalizationReport report_from_json(const json& j, std::size_t line) {
  if (!j.is_object()) throw SchemaError(line, "normalization must be an object");
  NormalizationReport r;
  r.input_metrics = metrics_from_json(require(j, "input", line), line);
  r.output_metrics = metrics_from_json(require(j, "output", line), line);
  const json& rules = require(j, "rules_fired", line);
  if (!rules.is_object()) throw SchemaError(line, "rules_fired must be an object");
  for (const auto& [name, count] : rules.items()) {
    if (!count.is_number_unsigned()) throw SchemaError(line, "rule counts must be non-negative integers");
    r.rules_fired[name] = count.get<std::size_t>();
  }
  r.casts_stripped = require_count(j, "casts_stripped", line);
  return r;
}

}  // namespace

ordered_json to_json(const NormalizationReport& report) { return report_json(report); }

std::vector<RawInstance> parse_raw_instances(std::string_view jsonl) {
  std::vector<RawInstance> out;
  for_each_json_line(jsonl, [&](std::size_t line, const json& j) {
    RawInstance base;
    base.id = require_string(j, "id", line);
    if (base.id.empty()) throw SchemaError(line, "empty id");
    base.program_text = require_string(j, "program", line);
    base.t_b = optional_number(j, "t_b", line);
    if (base.t_b && !(*base.t_b > 0)) throw SchemaError(line, "t_b must be positive");
    base.preconditions = optional_properties(j, "preconditions", line);
    auto add = [&](const json& entry) {
      RawInstance r = base;
      r.marker = require_string(entry, "marker", line);
      r.raw_invariant = require_string(entry, "raw_invariant", line);
      if (!is_marker_name(r.marker)) throw SchemaError(line, "not a loop marker: " + r.marker);
      if (trim(r.raw_invariant).empty()) throw SchemaError(line, "empty raw_invariant");
      out.push_back(std::move(r));
    };
    if (j.contains("invariants")) {
      if (!j["invariants"].is_array()) throw SchemaError(line, "invariants must be an array");
      for (const auto& entry : j["invariants"]) add(entry);
    } else {
      add(j);
    }
  });
  return out;
}

std::vector<RawInstance> load_raw_instances(const std::string& path) {
  return parse_raw_instances(read_file(path));
}

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::V0: return "V0";
    case Stage::V1: return "V1";
    case Stage::V2: return "V2";
  }
  return "?";
}

ordered_json to_json(const CuratedSample& s) {
  ordered_json j;
  j["id"] = s.id;
  j["stage"] = to_string(s.stage);
  j["program_text"] = s.program_text;
  j["marker"] = s.marker;
  j["invariant_text"] = s.invariant_text;
  j["grade"] = nullable(s.grade);
  j["t_b"] = s.t_b;
  j["t1"] = nullable(s.t1);
  j["t2"] = nullable(s.t2);
  j["t_v"] = nullable(s.t_v);
  j["char_length"] = s.char_length;
  j["num_disjuncts"] = s.num_disjuncts;
  j["source_rationale"] = nullable(s.source_rationale);
  j["normalization"] = s.normalization ? ordered_json(report_json(*s.normalization)) : ordered_json(nullptr);
  return j;
}

CuratedSample sample_from_json(const json& j, std::size_t line) {
  CuratedSample s;
  s.id = require_string(j, "id", line);
  if (s.id.empty()) throw SchemaError(line, "empty id");
  const std::string stage = require_string(j, "stage", line);
  if (stage == "V0") {
    s.stage = Stage::V0;
  } else if (stage == "V1") {
    s.stage = Stage::V1;
  } else if (stage == "V2") {
    s.stage = Stage::V2;
  } else {
    throw SchemaError(line, "unknown stage '" + stage + "'");
  }
  s.program_text = require_string(j, "program_text", line);
  s.marker = require_string(j, "marker", line);
  if (!is_marker_name(s.marker)) throw SchemaError(line, "not a loop marker: " + s.marker);
  s.invariant_text = require_string(j, "invariant_text", line);
  s.t_b = require_number(j, "t_b", line);
  if (!(s.t_b > 0)) throw SchemaError(line, "t_b must be positive");
  if (j.contains("grade") && !j["grade"].is_null()) {
    if (!j["grade"].is_number_integer()) throw SchemaError(line, "grade must be an integer");
    s.grade = j["grade"].get<int>();
    if (*s.grade < 0 || *s.grade > 3) throw SchemaError(line, "grade out of range");
  }
  s.t1 = optional_number(j, "t1", line);
  s.t2 = optional_number(j, "t2", line);
  s.t_v = optional_number(j, "t_v", line);
  s.char_length = require_count(j, "char_length", line);
  s.num_disjuncts = require_count(j, "num_disjuncts", line);
  if (j.contains("source_rationale") && !j["source_rationale"].is_null()) {
    if (!j["source_rationale"].is_string()) throw SchemaError(line, "source_rationale must be a string");
    s.source_rationale = j["source_rationale"].get<std::string>();
  }
  if (j.contains("normalization") && !j["normalization"].is_null()) {
    s.normalization = report_from_json(j["normalization"], line);
  }

  PredExpr parsed;
  try {
    parsed = parse_predicate(s.invariant_text);
  } catch (const ParseError& e) {
    throw SchemaError(line, std::string("invariant_text does not parse: ") + e.what());
  }
  if (s.stage != Stage::V0 && print_minimal(parsed) != s.invariant_text) {
    throw SchemaError(line, "invariant_text does not round-trip through parse/print");
  }
  if (s.char_length != s.invariant_text.size()) throw SchemaError(line, "char_length does not match invariant_text");
  if (s.num_disjuncts != expr_metrics(parsed).num_disjuncts) {
    throw SchemaError(line, "num_disjuncts does not match invariant_text");
  }
  if (s.stage == Stage::V2) {
    if (!s.grade || *s.grade < 2) throw SchemaError(line, "V2 samples need grade >= 2");
    if (!s.t1 || !s.t2 || !s.t_v) throw SchemaError(line, "V2 samples need t1, t2 and t_v");
  }
  return s;
}

std::string to_jsonl(const std::vector<CuratedSample>& samples) {
  std::string out;
  for (const auto& s : samples) {
    out += to_json(s).dump();
    out += '\n';
  }
  return out;
}

void emit_jsonl(const std::vector<CuratedSample>& samples, const std::string& path) {
  write_file(path, to_jsonl(samples));
}

std::vector<CuratedSample> parse_jsonl(std::string_view jsonl) {
  std::vector<CuratedSample> out;
  for_each_json_line(jsonl, [&](std::size_t line, const json& j) { out.push_back(sample_from_json(j, line)); });
  return out;
}

std::vector<CuratedSample> load_jsonl(const std::string& path) { return parse_jsonl(read_file(path)); }

CurateOutcome curate_instance(const RawInstance& raw, const CurateConfig& config,
                              const LlmClient& llm, const OracleBackend& backend) {
  CurateOutcome out;
  try {
    const std::string v0_text = trim(raw.raw_invariant);
    if (v0_text.empty()) {
      out.skip_reason = "empty raw invariant";
      return out;
    }
    PredExpr v0;
    try {
      v0 = parse_predicate(v0_text);
    } catch (const ParseError& e) {
      out.skip_reason = std::string("raw invariant does not parse: ") + e.what();
      return out;
    }
    Program program = Program::from_source(raw.program_text);
    if (!program.find_marker(raw.marker)) {
      out.skip_reason = "marker " + raw.marker + " not in program";
      return out;
    }
    if (!program.target_predicate()) {
      out.skip_reason = "program has no usable assertion";
      return out;
    }
    const Normalized v1 = normalize_raw(v0);
    if (is_degenerate(v1.expr)) {
      out.skip_reason = "degenerate invariant";
      return out;
    }

    VerificationQuery query = VerificationQuery::from_program(std::move(program));
    query.preconditions = raw.preconditions;
    double t_b = 0;
    if (raw.t_b) {
      t_b = *raw.t_b;
    } else {
      const auto baseline = baseline_median(backend, query, config.baseline_runs, config.grade.timeout);
      t_b = baseline.t_b;
      if (baseline.all_timed_out) spdlog::info("[{}] baseline timed out on every run", raw.id);
    }
    if (!(t_b > 0)) {
      out.skip_reason = "baseline time is not positive";
      return out;
    }

    CuratedSample s0;
    s0.id = raw.id;
    s0.stage = Stage::V0;
    s0.program_text = raw.program_text;
    s0.marker = raw.marker;
    s0.invariant_text = v0_text;
    s0.t_b = t_b;
    s0.char_length = v0_text.size();
    s0.num_disjuncts = expr_metrics(v0).num_disjuncts;
    out.samples.push_back(s0);

    CuratedSample s1 = s0;
    s1.stage = Stage::V1;
    s1.invariant_text = print_minimal(v1.expr);
    s1.char_length = s1.invariant_text.size();
    s1.num_disjuncts = v1.report.output_metrics.num_disjuncts;
    s1.normalization = v1.report;
    out.samples.push_back(s1);

    SimplifyContext ctx;
    ctx.program_text = raw.program_text;
    ctx.normalized_predicate = v1.expr;
    ctx.marker = raw.marker;
    ctx.n_candidates = config.n_candidates;
    ctx.verbosity_threshold = config.verbosity_threshold;
    const SimplifyResult simplified = simplify_invariant(query, ctx, t_b, llm, backend, config.grade);
    out.simplify = simplified.stats;
    for (const auto& k : simplified.kept) {
      CuratedSample s2 = s0;
      s2.stage = Stage::V2;
      s2.invariant_text = k.text;
      s2.char_length = k.text.size();
      s2.num_disjuncts = expr_metrics(k.predicate).num_disjuncts;
      s2.grade = k.grade;
      s2.t1 = k.graded.split->v1.wall_time;
      s2.t2 = k.graded.split->v2.wall_time;
      s2.t_v = k.graded.split->t_v;
      if (!k.rationale.empty()) s2.source_rationale = k.rationale;
      out.samples.push_back(std::move(s2));
    }
  } catch (const std::exception& e) {
    out.samples.clear();
    out.skip_reason = e.what();
  }
  return out;
}

Distribution describe(std::vector<double> values) {
  Distribution d;
  d.count = values.size();
  if (values.empty()) return d;
  std::sort(values.begin(), values.end());
  d.min = values.front();
  d.max = values.back();
  d.median = values[(values.size() - 1) / 2];
  d.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  return d;
}

StatsReport dataset_stats(const std::vector<CuratedSample>& samples) {
  StatsReport r;
  r.total = samples.size();
  std::vector<double> lengths;
  std::map<std::string, std::vector<double>> stage_lengths;
  std::vector<double> speedups;
  for (const auto& s : samples) {
    const std::string stage(to_string(s.stage));
    ++r.per_stage[stage];
    if (s.grade) ++r.per_grade[*s.grade];
    lengths.push_back(static_cast<double>(s.char_length));
    stage_lengths[stage].push_back(static_cast<double>(s.char_length));
    if (s.grade == 3 && s.t_v && *s.t_v > 0) speedups.push_back(s.t_b / *s.t_v);
  }
  r.char_length = describe(lengths);
  for (auto& [stage, values] : stage_lengths) r.char_length_per_stage[stage] = describe(values);
  r.speedup = describe(speedups);
  return r;
}

namespace {

ordered_json distribution_json(const Distribution& d) {
  return {{"count", d.count}, {"min", d.min}, {"median", d.median}, {"mean", d.mean}, {"max", d.max}};
}

}  // namespace

ordered_json to_json(const StatsReport& r) {
  ordered_json j;
  j["total"] = r.total;
  j["per_stage"] = ordered_json::object();
  for (const auto& [stage, n] : r.per_stage) j["per_stage"][stage] = n;
  j["per_grade"] = ordered_json::object();
  for (const auto& [grade, n] : r.per_grade) j["per_grade"][std::to_string(grade)] = n;
  j["char_length"] = distribution_json(r.char_length);
  j["char_length_per_stage"] = ordered_json::object();
  for (const auto& [stage, d] : r.char_length_per_stage) j["char_length_per_stage"][stage] = distribution_json(d);
  j["speedup_grade3"] = distribution_json(r.speedup);
  return j;
}

std::string format_stats(const StatsReport& r) {
  std::ostringstream out;
  out << "samples: " << r.total << "\n";
  for (const auto& [stage, n] : r.per_stage) out << "  " << stage << ": " << n << "\n";
  out << "grades:\n";
  for (const auto& [grade, n] : r.per_grade) out << "  " << grade << ": " << n << "\n";
  auto line = [&out](const std::string& name, const Distribution& d) {
    out << name << ": n=" << d.count << " min=" << d.min << " median=" << d.median << " mean=" << d.mean
        << " max=" << d.max << "\n";
  };
  line("char_length", r.char_length);
  for (const auto& [stage, d] : r.char_length_per_stage) line("char_length " + stage, d);
  line("speedup (grade 3)", r.speedup);
  return out.str();
}

DataSplit split_ids(std::vector<std::string> ids, std::uint64_t seed, double train_fraction) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  // Fisher-Yates with plain modulo keeps the order identical across standard
  // libraries, unlike std::shuffle.
  std::mt19937_64 rng(seed);
  for (std::size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[rng() % i]);
  const auto n_train = static_cast<std::size_t>(static_cast<double>(ids.size()) * train_fraction + 0.5);
  DataSplit split;
  split.train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(std::min(n_train, ids.size())));
  split.validation.assign(ids.begin() + static_cast<std::ptrdiff_t>(split.train.size()), ids.end());
  return split;
}

CurationSummary run_curation(const std::vector<RawInstance>& instances, const CurateConfig& config,
                             const LlmClient& llm, const OracleBackend& backend,
                             const std::string& out_dir, std::uint64_t seed, int workers,
                             const ordered_json& config_snapshot) {
  std::vector<CurateOutcome> outcomes(instances.size());
  parallel_for(instances.size(), workers, [&](std::size_t i) {
    outcomes[i] = curate_instance(instances[i], config, llm, backend);
    if (outcomes[i].samples.empty()) {
      spdlog::warn("[{} {}] skipped: {}", instances[i].id, instances[i].marker, outcomes[i].skip_reason);
    } else {
      spdlog::info("[{} {}] {} samples", instances[i].id, instances[i].marker, outcomes[i].samples.size());
    }
  });

  CurationSummary summary;
  summary.instances = instances.size();
  std::vector<CuratedSample> stages[3];
  ordered_json skipped = ordered_json::array();
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    ids.push_back(instances[i].id);
    if (outcomes[i].samples.empty()) {
      ++summary.skipped;
      skipped.push_back({{"id", instances[i].id}, {"marker", instances[i].marker}, {"reason", outcomes[i].skip_reason}});
    }
    for (const auto& s : outcomes[i].samples) stages[static_cast<int>(s.stage)].push_back(s);
  }
  summary.v0 = stages[0].size();
  summary.v1 = stages[1].size();
  summary.v2 = stages[2].size();

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  emit_jsonl(stages[0], (fs::path(out_dir) / "v0.jsonl").string());
  emit_jsonl(stages[1], (fs::path(out_dir) / "v1.jsonl").string());
  emit_jsonl(stages[2], (fs::path(out_dir) / "v2.jsonl").string());

  const DataSplit split = split_ids(ids, seed);
  ordered_json manifest;
  manifest["seed"] = seed;
  manifest["config"] = config_snapshot.is_null() ? ordered_json::object() : config_snapshot;
  manifest["counts"] = {{"instances", summary.instances}, {"skipped", summary.skipped},
                        {"v0", summary.v0},               {"v1", summary.v1},
                        {"v2", summary.v2}};
  manifest["split"] = {{"train", split.train}, {"validation", split.validation}};
  manifest["skipped"] = skipped;
  write_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
  return summary;
}

}  // namespace invkit
