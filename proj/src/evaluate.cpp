#include "invkit/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>

#include <spdlog/spdlog.h>

#include "invkit/parallel.hpp"
#include "invkit/simplify.hpp"
#include "jsonl.hpp"

namespace invkit {

using nlohmann::json;
using nlohmann::ordered_json;
using namespace detail;

std::vector<EvalInstance> parse_eval_instances(std::string_view jsonl) {
  std::vector<EvalInstance> out;
  for_each_json_line(jsonl, [&](std::size_t line, const json& j) {
    EvalInstance inst;
    inst.id = require_string(j, "id", line);
    if (inst.id.empty()) throw SchemaError(line, "empty id");
    inst.program_text = require_string(j, "program", line);
    inst.marker = require_string(j, "marker", line);
    if (!is_marker_name(inst.marker)) throw SchemaError(line, "not a loop marker: " + inst.marker);
    inst.t_b = optional_number(j, "t_b", line);
    if (inst.t_b && !(*inst.t_b > 0)) throw SchemaError(line, "t_b must be positive");
    if (j.contains("baseline_timed_out") && !j["baseline_timed_out"].is_null()) {
      if (!j["baseline_timed_out"].is_boolean()) throw SchemaError(line, "baseline_timed_out must be a boolean");
      inst.baseline_timed_out = j["baseline_timed_out"].get<bool>();
    }
    inst.preconditions = optional_properties(j, "preconditions", line);
    out.push_back(std::move(inst));
  });
  return out;
}

std::vector<EvalInstance> load_eval_instances(const std::string& path) {
  return parse_eval_instances(read_file(path));
}

PromptPair build_generation_prompt(const EvalInstance& instance) {
  return {std::string(prompts::kGenerationSystem),
          fill_template(prompts::kGenerationUser,
                        {{"program", instance.program_text}, {"target_marker", instance.marker}})};
}

ParsedGeneration parse_generation_response(std::string_view text, std::string_view expected_marker) {
  ParsedGeneration out;
  const auto object = first_json_object(text);
  if (!object) {
    out.error = "no JSON object in model output";
    return out;
  }
  const json doc = json::parse(*object);
  if (doc.size() != 2 || !doc.contains("marker") || !doc.contains("content")) {
    out.error = "expected exactly the keys marker and content";
    return out;
  }
  if (!doc["marker"].is_string() || !doc["content"].is_string()) {
    out.error = "marker and content must be strings";
    return out;
  }
  if (doc["marker"].get<std::string>() != expected_marker) {
    out.error = "marker '" + doc["marker"].get<std::string>() + "' is not the target";
    return out;
  }
  const std::string content = doc["content"].get<std::string>();
  if (!check_no_side_effects(content)) {
    out.error = "content has a side-effecting operator";
    return out;
  }
  try {
    out.predicate = parse_predicate(content);
  } catch (const ParseError& e) {
    out.error = e.what();
  }
  return out;
}

ModelAnswer LlmModelSource::generate(const EvalInstance& instance) const {
  const PromptPair prompt = build_generation_prompt(instance);
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::string> replies = client_.complete(prompt.system, prompt.user, 1);
  const double t_m = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (replies.empty()) throw TransportError("model returned no completion");
  return {std::move(replies.front()), t_m};
}

ReplayModelSource ReplayModelSource::parse(std::string_view jsonl) {
  std::map<std::string, ModelAnswer> answers;
  for_each_json_line(jsonl, [&](std::size_t line, const json& j) {
    const std::string id = require_string(j, "id", line);
    ModelAnswer a;
    a.output = require_string(j, "output", line);
    a.t_m = optional_number(j, "t_m", line).value_or(0.0);
    if (a.t_m < 0) throw SchemaError(line, "t_m must not be negative");
    if (!answers.emplace(id, std::move(a)).second) throw SchemaError(line, "duplicate id '" + id + "'");
  });
  return ReplayModelSource(std::move(answers));
}

ReplayModelSource ReplayModelSource::load(const std::string& path) { return parse(read_file(path)); }

ModelAnswer ReplayModelSource::generate(const EvalInstance& instance) const {
  const auto it = answers_.find(instance.id);
  if (it == answers_.end()) throw TransportError("no recorded output for '" + instance.id + "'");
  return it->second;
}

ordered_json to_json(const EvalRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["raw_output"] = r.raw_output;
  j["invariant"] = r.invariant ? ordered_json(*r.invariant) : ordered_json(nullptr);
  j["t_m"] = r.t_m;
  j["valid"] = r.valid;
  j["correct"] = r.correct;
  j["speedup"] = r.speedup;
  j["outcome"] = to_string(r.outcome);
  j["v1"] = r.v1 ? ordered_json(to_string(*r.v1)) : ordered_json(nullptr);
  j["v2"] = r.v2 ? ordered_json(to_string(*r.v2)) : ordered_json(nullptr);
  j["t1"] = r.t1;
  j["t2"] = r.t2;
  j["t_v"] = r.t_v;
  j["t_b"] = r.t_b;
  j["baseline_timed_out"] = r.baseline_timed_out;
  j["S"] = r.speedup_factor;
  j["vbs"] = r.vbs;
  j["diagnostic"] = r.diagnostic;
  return j;
}

EvalRecord evaluate_instance(const EvalInstance& instance, const OracleBackend& backend,
                             const ModelSource& model, double timeout) {
  EvalRecord r;
  r.id = instance.id;
  r.t_b = instance.t_b.value_or(timeout);
  r.baseline_timed_out = instance.baseline_timed_out || r.t_b >= timeout;
  r.vbs = r.t_b;

  ModelAnswer answer;
  try {
    answer = model.generate(instance);
  } catch (const std::exception& e) {
    r.diagnostic = std::string("model call failed: ") + e.what();
    return r;
  }
  r.raw_output = answer.output;
  r.t_m = answer.t_m;

  const ParsedGeneration parsed = parse_generation_response(answer.output, instance.marker);
  if (!parsed.valid()) {
    r.diagnostic = "invalid: " + parsed.error;
    return r;
  }
  r.valid = true;
  r.invariant = print_minimal(parsed.predicate);

  SplitResult split;
  try {
    VerificationQuery query = VerificationQuery::from_program(Program::from_source(instance.program_text));
    query.preconditions = instance.preconditions;
    split = run_split(backend, query, Property{instance.marker, parsed.predicate}, timeout);
  } catch (const std::exception& e) {
    r.diagnostic = std::string("instance error: ") + e.what();
    return r;
  }
  r.v1 = split.v1.outcome;
  r.v2 = split.v2.outcome;
  r.t1 = split.v1.wall_time;
  r.t2 = split.v2.wall_time;
  r.t_v = split.t_v;
  r.outcome = decide(split.v1, split.v2);
  r.correct = split.v1.outcome == Outcome::True;
  if (r.correct && r.conclusive()) {
    r.speedup = r.t_v < r.t_b;
    r.speedup_factor = r.t_b / std::max(r.t_v, 1e-12);
    r.vbs = std::min(r.t_v, r.t_b);
  }
  std::string diag;
  if (!split.v1.diagnostic.empty()) diag = "v1: " + split.v1.diagnostic;
  if (!split.v2.diagnostic.empty()) diag += (diag.empty() ? "" : "; ") + std::string("v2: ") + split.v2.diagnostic;
  r.diagnostic = std::move(diag);
  return r;
}

namespace {

double sorted_mean(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double percent(std::size_t k, std::size_t n) {
  return n == 0 ? 0.0 : 100.0 * static_cast<double>(k) / static_cast<double>(n);
}

double round6(double x) { return std::round(x * 1e6) / 1e6; }

}  // namespace

MetricsReport compute_metrics(const std::vector<EvalRecord>& records, bool include_latency) {
  MetricsReport m;
  m.n = records.size();
  std::size_t valid = 0, correct = 0, speedup = 0;
  std::vector<double> factors, vbs, vbs_e2e, t_b;
  for (const auto& r : records) {
    valid += r.valid;
    correct += r.correct;
    if (r.speedup) {
      ++speedup;
      factors.push_back(r.speedup_factor);
    }
    vbs.push_back(r.vbs);
    t_b.push_back(r.t_b);
    // The model only delays the split arm; the baseline arm is unaffected.
    vbs_e2e.push_back(r.correct && r.conclusive() ? std::min(r.t_v + r.t_m, r.t_b) : r.t_b);
    if (r.baseline_timed_out) {
      ++m.baseline_timeouts;
      if (r.conclusive()) ++m.solved_timeouts;
    }
  }
  m.r_valid = percent(valid, m.n);
  m.r_correct = percent(correct, m.n);
  m.r_speedup = percent(speedup, m.n);
  if (!factors.empty()) m.mean_speedup = sorted_mean(factors);
  m.vbp = sorted_mean(vbs);
  if (include_latency) m.vbp_e2e = sorted_mean(vbs_e2e);
  m.mean_t_b = sorted_mean(t_b);
  return m;
}

ordered_json to_json(const MetricsReport& m) {
  ordered_json j;
  j["n"] = m.n;
  j["R_valid"] = round6(m.r_valid);
  j["R_correct"] = round6(m.r_correct);
  j["R_speedup"] = round6(m.r_speedup);
  j["S_bar_gt1"] = m.mean_speedup ? ordered_json(round6(*m.mean_speedup)) : ordered_json(nullptr);
  j["VBP"] = round6(m.vbp);
  j["VBP_E2E"] = m.vbp_e2e ? ordered_json(round6(*m.vbp_e2e)) : ordered_json(nullptr);
  j["mean_t_b"] = round6(m.mean_t_b);
  j["baseline_timeouts"] = m.baseline_timeouts;
  j["solved_timeouts"] = m.solved_timeouts;
  return j;
}

std::string format_metrics(const MetricsReport& m) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << "instances      " << m.n << "\n"
      << "R_valid        " << m.r_valid << " %\n"
      << "R_correct      " << m.r_correct << " %\n"
      << "R_speedup      " << m.r_speedup << " %\n"
      << "S_mean (>1)    ";
  if (m.mean_speedup) {
    out << *m.mean_speedup << "x\n";
  } else {
    out << "-\n";
  }
  out << "VBP            " << m.vbp << " s\n";
  if (m.vbp_e2e) out << "VBP_E2E        " << *m.vbp_e2e << " s\n";
  out << "mean t_b       " << m.mean_t_b << " s\n"
      << "solved         " << m.solved_timeouts << " / " << m.baseline_timeouts << " baseline timeouts\n";
  return out.str();
}

std::pair<std::vector<std::string>, std::vector<std::string>> partition_easy_hard(
    const std::vector<std::pair<std::string, double>>& baseline_times, double threshold) {
  std::pair<std::vector<std::string>, std::vector<std::string>> out;
  for (const auto& [id, t_b] : baseline_times) (t_b > threshold ? out.second : out.first).push_back(id);
  return out;
}

std::vector<EvalRecord> run_evaluation(std::vector<EvalInstance> instances, const OracleBackend& backend,
                                       const ModelSource& model, const EvalRunOptions& options) {
  std::vector<EvalRecord> records(instances.size());
  parallel_for(instances.size(), options.workers, [&](std::size_t i) {
    EvalInstance& inst = instances[i];
    if (!inst.t_b) {
      try {
        auto query = VerificationQuery::from_program(Program::from_source(inst.program_text));
        query.preconditions = inst.preconditions;
        const BaselineResult b = baseline_median(backend, query, options.baseline_runs, options.timeout);
        inst.t_b = b.t_b;
        inst.baseline_timed_out = inst.baseline_timed_out || b.all_timed_out;
      } catch (const std::exception& e) {
        spdlog::warn("[{}] baseline failed: {}", inst.id, e.what());
        inst.t_b = options.timeout;
      }
    }
    records[i] = evaluate_instance(inst, backend, model, options.timeout);
    spdlog::info("[{}] valid={} correct={} outcome={} t_v={:.3f} t_b={:.3f}", inst.id, records[i].valid,
                 records[i].correct, to_string(records[i].outcome), records[i].t_v, records[i].t_b);
  });
  return records;
}

void write_evaluation(const std::vector<EvalRecord>& records, const MetricsReport& metrics,
                      const std::string& out_dir, bool csv) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::string lines;
  for (const auto& r : records) lines += to_json(r).dump() + "\n";
  write_file(fs::path(out_dir) / "records.jsonl", lines);
  write_file(fs::path(out_dir) / "metrics.json", to_json(metrics).dump(2) + "\n");
  if (csv) {
    std::ostringstream out;
    out << "id,outcome,valid,correct,speedup,t_m,t1,t2,t_v,t_b,S,vbs\n";
    auto num = [](double x) { return json(x).dump(); };  // shortest round-trip form
    for (const auto& r : records) {
      out << r.id << ',' << to_string(r.outcome) << ',' << r.valid << ',' << r.correct << ',' << r.speedup << ','
          << num(r.t_m) << ',' << num(r.t1) << ',' << num(r.t2) << ',' << num(r.t_v) << ',' << num(r.t_b) << ','
          << num(r.speedup_factor) << ',' << num(r.vbs) << '\n';
    }
    write_file(fs::path(out_dir) / "timings.csv", out.str());
  }
}

}  // namespace invkit
