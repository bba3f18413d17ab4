#include "invkit/cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "invkit/curate.hpp"
#include "invkit/evaluate.hpp"
#include "invkit/grade.hpp"
#include "invkit/normalize.hpp"
#include "invkit/parallel.hpp"
#include "jsonl.hpp"

namespace invkit {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view want) {
  throw std::invalid_argument("config '" + std::string(key) + "': expected " + std::string(want) + ", got '" +
                              std::string(value) + "'");
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) bad_value(key, v, "a number");
  return out;
}

template <typename T>
T to_integer(std::string_view key, std::string_view v) {
  T out = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  std::string s(v);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  bad_value(key, v, "a boolean");
}

struct Key {
  const char* name;
  std::function<void(ToolConfig&, std::string_view, std::string_view)> set;
  std::function<ordered_json(const ToolConfig&)> get;
};

template <typename T>
Key number_key(const char* name, T ToolConfig::*field) {
  return {name,
          [field](ToolConfig& c, std::string_view k, std::string_view v) {
            if constexpr (std::is_floating_point_v<T>) {
              c.*field = to_double(k, v);
            } else {
              c.*field = to_integer<T>(k, v);
            }
          },
          [field](const ToolConfig& c) { return ordered_json(c.*field); }};
}

template <typename S, typename T>
Key nested_key(const char* name, S ToolConfig::*outer, T S::*field) {
  return {name,
          [outer, field](ToolConfig& c, std::string_view k, std::string_view v) {
            T& dst = c.*outer.*field;
            if constexpr (std::is_same_v<T, std::string>) {
              dst = std::string(v);
            } else if constexpr (std::is_same_v<T, bool>) {
              dst = to_bool(k, v);
            } else if constexpr (std::is_floating_point_v<T>) {
              dst = to_double(k, v);
            } else {
              dst = to_integer<T>(k, v);
            }
          },
          [outer, field](const ToolConfig& c) { return ordered_json(c.*outer.*field); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"backend", [](ToolConfig& c, std::string_view, std::string_view v) { c.backend = std::string(v); },
       [](const ToolConfig& c) { return ordered_json(c.backend); }},
      number_key("timeout", &ToolConfig::timeout),
      number_key("workers", &ToolConfig::workers),
      number_key("seed", &ToolConfig::seed),
      {"output_dir", [](ToolConfig& c, std::string_view, std::string_view v) { c.output_dir = std::string(v); },
       [](const ToolConfig& c) { return ordered_json(c.output_dir); }},
      number_key("n_candidates", &ToolConfig::n_candidates),
      number_key("verbosity_threshold", &ToolConfig::verbosity_threshold),
      number_key("baseline_runs", &ToolConfig::baseline_runs),
      number_key("grading_runs", &ToolConfig::grading_runs),
      number_key("hard_threshold", &ToolConfig::hard_threshold),
      {"csv", [](ToolConfig& c, std::string_view k, std::string_view v) { c.csv = to_bool(k, v); },
       [](const ToolConfig& c) { return ordered_json(c.csv); }},
      {"time_model",
       [](ToolConfig& c, std::string_view k, std::string_view v) {
         if (v == "wall") {
           c.time_model = TimeModel::Wall;
         } else if (v == "steps") {
           c.time_model = TimeModel::Steps;
         } else {
           bad_value(k, v, "wall or steps");
         }
       },
       [](const ToolConfig& c) { return ordered_json(c.time_model == TimeModel::Steps ? "steps" : "wall"); }},
      number_key("step_seconds", &ToolConfig::step_seconds),
      nested_key("external.command", &ToolConfig::external, &ExternalBackendConfig::command),
      nested_key("external.true_regex", &ToolConfig::external, &ExternalBackendConfig::true_regex),
      nested_key("external.false_regex", &ToolConfig::external, &ExternalBackendConfig::false_regex),
      nested_key("external.unknown_regex", &ToolConfig::external, &ExternalBackendConfig::unknown_regex),
      nested_key("external.memory_limit_wrapper", &ToolConfig::external,
                 &ExternalBackendConfig::memory_limit_wrapper),
      nested_key("external.keep_artifacts", &ToolConfig::external, &ExternalBackendConfig::keep_artifacts),
      nested_key("external.artifact_dir", &ToolConfig::external, &ExternalBackendConfig::artifact_dir),
      nested_key("llm.base_url", &ToolConfig::llm, &LlmConfig::base_url),
      nested_key("llm.model", &ToolConfig::llm, &LlmConfig::model),
      nested_key("llm.temperature", &ToolConfig::llm, &LlmConfig::temperature),
      nested_key("llm.top_p", &ToolConfig::llm, &LlmConfig::top_p),
      nested_key("llm.max_tokens", &ToolConfig::llm, &LlmConfig::max_tokens),
      nested_key("llm.api_key_env", &ToolConfig::llm, &LlmConfig::api_key_env),
      nested_key("llm.max_retries", &ToolConfig::llm, &LlmConfig::max_retries),
      nested_key("llm.backoff_initial", &ToolConfig::llm, &LlmConfig::backoff_initial),
      nested_key("llm.backoff_max", &ToolConfig::llm, &LlmConfig::backoff_max),
      nested_key("llm.request_timeout", &ToolConfig::llm, &LlmConfig::request_timeout),
      nested_key("llm.stub_dir", &ToolConfig::llm, &LlmConfig::stub_dir),
  };
  return table;
}

const Key& find_key(std::string_view name) {
  for (const auto& k : keys()) {
    if (name == k.name) return k;
  }
  throw std::invalid_argument("unknown config key '" + std::string(name) + "'");
}

void flatten(const json& node, const std::string& prefix, std::map<std::string, std::string>& out) {
  for (const auto& [name, value] : node.items()) {
    const std::string key = prefix.empty() ? name : prefix + "." + name;
    if (value.is_object()) {
      flatten(value, key, out);
    } else if (value.is_string()) {
      out[key] = value.get<std::string>();
    } else if (value.is_boolean() || value.is_number()) {
      out[key] = value.dump();
    } else {
      throw std::invalid_argument("config '" + key + "': unsupported value " + value.dump());
    }
  }
}

std::optional<std::string> getenv_lookup(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

CurateConfig curate_config(const ToolConfig& c) {
  CurateConfig cc;
  cc.n_candidates = c.n_candidates;
  cc.verbosity_threshold = c.verbosity_threshold;
  cc.grade.timeout = c.timeout;
  cc.grade.grading_runs = c.grading_runs;
  cc.baseline_runs = c.baseline_runs;
  return cc;
}

std::string optional_outcome(const std::optional<SplitResult>& split, bool first) {
  if (!split) return "";
  return std::string(to_string(first ? split->v1.outcome : split->v2.outcome));
}

}  // namespace

void ToolConfig::validate() const {
  auto positive = [](const char* name, double v) {
    if (!(v > 0)) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  if (backend != "builtin" && backend != "external") {
    throw std::invalid_argument("backend must be builtin or external, not '" + backend + "'");
  }
  positive("timeout", timeout);
  positive("workers", workers);
  positive("n_candidates", n_candidates);
  positive("verbosity_threshold", static_cast<double>(verbosity_threshold));
  positive("baseline_runs", baseline_runs);
  positive("grading_runs", grading_runs);
  positive("hard_threshold", hard_threshold);
  positive("step_seconds", step_seconds);
  positive("llm.max_tokens", llm.max_tokens);
  positive("llm.request_timeout", llm.request_timeout);
  if (output_dir.empty()) throw std::invalid_argument("output_dir must not be empty");
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : keys()) out.emplace_back(k.name);
  return out;
}

void set_config_value(ToolConfig& config, std::string_view key, std::string_view value) {
  find_key(key).set(config, key, value);
}

void apply_config_json(ToolConfig& config, const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  std::map<std::string, std::string> flat;
  flatten(doc, "", flat);
  for (const auto& [key, value] : flat) set_config_value(config, key, value);
}

void apply_config_file(ToolConfig& config, const std::string& path) {
  const std::string text = detail::read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  apply_config_json(config, doc);
}

std::string env_var_name(std::string_view key) {
  std::string out = "INVKIT_";
  for (char c : key) out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

void apply_environment(ToolConfig& config,
                       const std::function<std::optional<std::string>(const std::string&)>& lookup) {
  const auto& get = lookup ? lookup : getenv_lookup;
  for (const auto& k : keys()) {
    if (auto v = get(env_var_name(k.name))) k.set(config, k.name, *v);
  }
}

ToolConfig resolve_config(const std::optional<std::string>& config_file,
                          const std::map<std::string, std::string>& overrides,
                          const std::function<std::optional<std::string>(const std::string&)>& lookup) {
  ToolConfig config;
  if (config_file) apply_config_file(config, *config_file);
  apply_environment(config, lookup);
  for (const auto& [key, value] : overrides) set_config_value(config, key, value);
  config.validate();
  return config;
}

ordered_json to_json(const ToolConfig& config) {
  ordered_json j = ordered_json::object();
  for (const auto& k : keys()) j[k.name] = k.get(config);
  return j;
}

std::unique_ptr<OracleBackend> make_backend(const ToolConfig& config) {
  if (config.backend == "external") return std::make_unique<ExternalBackend>(config.external);
  BuiltinLimits limits;
  limits.time_model = config.time_model;
  limits.step_seconds = config.step_seconds;
  return std::make_unique<BuiltinBackend>(limits);
}

NormalizeSummary cmd_normalize(const std::string& in_path, const std::string& out_path) {
  const std::string text = detail::read_file(in_path);
  NormalizeSummary summary;
  std::string out;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    ++summary.lines;
    const std::string trimmed(detail::trim(line));
    if (trimmed.empty()) continue;
    auto skip = [&](const std::string& why) {
      ++summary.skipped;
      summary.skip_messages.push_back("line " + std::to_string(summary.lines) + ": " + why);
    };

    std::string id = "line-" + std::to_string(summary.lines);
    std::string raw = trimmed;
    if (trimmed.front() == '{' || trimmed.front() == '"') {
      json j = json::parse(trimmed, nullptr, false);
      if (j.is_discarded()) {
        skip("malformed JSON");
        continue;
      }
      if (j.is_string()) {
        raw = j.get<std::string>();
      } else {
        const char* field = j.contains("invariant") ? "invariant" : "raw_invariant";
        if (!j.contains(field) || !j[field].is_string()) {
          skip("no invariant field");
          continue;
        }
        raw = j[field].get<std::string>();
        if (j.contains("id") && j["id"].is_string()) id = j["id"].get<std::string>();
      }
    }

    Normalized n;
    try {
      n = normalize_raw(parse_predicate(raw));
    } catch (const ParseError& e) {
      skip(e.what());
      continue;
    }
    if (is_degenerate(n.expr)) {
      skip("degenerate invariant");
      continue;
    }
    ++summary.normalized;
    for (const auto& [rule, count] : n.report.rules_fired) summary.rules_fired[rule] += count;
    summary.casts_stripped += n.report.casts_stripped;

    ordered_json rec;
    rec["id"] = id;
    rec["raw_invariant"] = raw;
    rec["invariant"] = print_minimal(n.expr);
    rec["char_length"] = n.report.output_metrics.char_length;
    rec["num_disjuncts"] = n.report.output_metrics.num_disjuncts;
    rec["normalization"] = to_json(n.report);
    out += rec.dump() + "\n";
  }
  detail::write_file(out_path, out);
  return summary;
}

std::string format_normalize_summary(const NormalizeSummary& s) {
  std::ostringstream out;
  out << "normalized " << s.normalized << ", skipped " << s.skipped << "\n";
  for (const auto& m : s.skip_messages) out << "  skip " << m << "\n";
  out << "casts stripped " << s.casts_stripped << "\n";
  for (const auto& [rule, count] : s.rules_fired) out << "  " << rule << " " << count << "\n";
  return out.str();
}

std::size_t cmd_curate(const ToolConfig& config, const std::string& instances_path) {
  const auto instances = load_raw_instances(instances_path);
  const auto backend = make_backend(config);
  const auto llm = make_llm_client(config.llm);
  const CurationSummary s = run_curation(instances, curate_config(config), *llm, *backend, config.output_dir,
                                         config.seed, config.workers, to_json(config));
  spdlog::info("curated {} instances: {} V0, {} V1, {} V2, {} skipped", s.instances, s.v0, s.v1, s.v2, s.skipped);
  return s.skipped;
}

std::size_t cmd_grade(const ToolConfig& config, const std::string& instances_path,
                      const std::string& invariants_path) {
  struct Candidate {
    std::string id, marker, text;
  };
  const auto instances = load_eval_instances(instances_path);
  std::map<std::string, const EvalInstance*> by_id;
  for (const auto& inst : instances) by_id[inst.id] = &inst;

  std::vector<Candidate> candidates;
  detail::for_each_json_line(detail::read_file(invariants_path), [&](std::size_t line, const json& j) {
    Candidate c;
    c.id = detail::require_string(j, "id", line);
    c.text = detail::require_string(j, "invariant", line);
    if (j.contains("marker")) c.marker = detail::require_string(j, "marker", line);
    candidates.push_back(std::move(c));
  });

  const auto backend = make_backend(config);
  const GradeOptions options{config.timeout, config.grading_runs};

  // Baselines are shared by every candidate of an instance.
  std::map<std::string, double> baselines;
  for (const auto& inst : instances) {
    if (inst.t_b) {
      baselines[inst.id] = *inst.t_b;
      continue;
    }
    try {
      auto query = VerificationQuery::from_program(Program::from_source(inst.program_text));
      query.preconditions = inst.preconditions;
      baselines[inst.id] = baseline_median(*backend, query, config.baseline_runs, config.timeout).t_b;
    } catch (const std::exception& e) {
      spdlog::warn("[{}] baseline failed: {}", inst.id, e.what());
    }
  }

  std::vector<ordered_json> rows(candidates.size());
  std::vector<char> failed(candidates.size(), 0);
  parallel_for(candidates.size(), config.workers, [&](std::size_t i) {
    const Candidate& c = candidates[i];
    ordered_json row;
    row["id"] = c.id;
    row["invariant"] = c.text;
    auto fail = [&](const std::string& why) {
      row["grade"] = nullptr;
      row["diagnostic"] = why;
      failed[i] = 1;
      spdlog::warn("[{}] not graded: {}", c.id, why);
    };
    const auto it = by_id.find(c.id);
    if (it == by_id.end()) {
      fail("no instance with this id");
    } else if (!baselines.count(c.id)) {
      fail("no baseline time");
    } else {
      const EvalInstance& inst = *it->second;
      const std::string marker = c.marker.empty() ? inst.marker : c.marker;
      row["marker"] = marker;
      try {
        auto query = VerificationQuery::from_program(Program::from_source(inst.program_text));
        query.preconditions = inst.preconditions;
        const GradedCandidate g =
            grade_candidate(query, marker, std::string_view(c.text), baselines.at(c.id), *backend, options);
        row["text"] = g.text;
        row["grade"] = g.grade;
        row["v1"] = optional_outcome(g.split, true);
        row["v2"] = optional_outcome(g.split, false);
        row["t1"] = g.split ? g.split->v1.wall_time : 0.0;
        row["t2"] = g.split ? g.split->v2.wall_time : 0.0;
        row["t_v"] = g.split ? g.split->t_v : 0.0;
        row["t_b"] = g.t_b;
        row["diagnostic"] = g.diagnostic;
        spdlog::info("[{} {}] grade {}", c.id, marker, g.grade);
      } catch (const std::exception& e) {
        fail(e.what());
      }
    }
    rows[i] = std::move(row);
  });

  fs::create_directories(config.output_dir);
  std::string out;
  for (const auto& row : rows) out += row.dump() + "\n";
  detail::write_file(fs::path(config.output_dir) / "grades.jsonl", out);
  return static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
}

std::string cmd_evaluate(const ToolConfig& config, const std::string& instances_path,
                         const std::optional<std::string>& from_file) {
  const auto instances = load_eval_instances(instances_path);
  const auto backend = make_backend(config);
  std::unique_ptr<LlmClient> llm;
  std::unique_ptr<ModelSource> model;
  if (from_file) {
    model = std::make_unique<ReplayModelSource>(ReplayModelSource::load(*from_file));
  } else {
    llm = make_llm_client(config.llm);
    model = std::make_unique<LlmModelSource>(*llm);
  }
  const EvalRunOptions options{config.timeout, config.baseline_runs, config.workers};
  const auto records = run_evaluation(instances, *backend, *model, options);
  const MetricsReport metrics = compute_metrics(records, true);
  write_evaluation(records, metrics, config.output_dir, config.csv);

  std::vector<std::pair<std::string, double>> times;
  for (const auto& r : records) times.emplace_back(r.id, r.t_b);
  const auto [easy, hard] = partition_easy_hard(times, config.hard_threshold);
  std::ostringstream out;
  out << format_metrics(metrics) << "easy/hard      " << easy.size() << " / " << hard.size() << " (t_b > "
      << config.hard_threshold << " s is hard)\n";
  return out.str();
}

std::string cmd_stats(const std::string& dataset_path, bool as_json) {
  const StatsReport report = dataset_stats(load_jsonl(dataset_path));
  return as_json ? to_json(report).dump(2) + "\n" : format_stats(report);
}

}  // namespace invkit
