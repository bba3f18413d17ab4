// invkit: loop-invariant dataset curation and evaluation.

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "invkit/cli.hpp"

namespace {

struct Globals {
  std::optional<std::string> config_file;
  std::map<std::string, std::string> overrides;
  bool verbose = false;
  bool quiet = false;
};

// Registers an option whose value overrides config key `key`.
void add_override(CLI::App& app, Globals& g, const std::string& flag, const std::string& key,
                  const std::string& help) {
  app.add_option_function<std::string>(
      flag, [&g, key](const std::string& v) { g.overrides[key] = v; }, help + " [" + key + "]");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loop-invariant curation, grading and evaluation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;

  app.add_option_function<std::string>(
      "--config", [&g](const std::string& v) { g.config_file = v; }, "JSON config file")
      ->check(CLI::ExistingFile);
  app.add_option_function<std::string>(
         "--backend", [&g](const std::string& v) { g.overrides["backend"] = v; }, "Verifier backend [backend]")
      ->check(CLI::IsMember({"builtin", "external"}));
  app.add_option_function<std::string>(
         "--time-model", [&g](const std::string& v) { g.overrides["time_model"] = v; },
         "Built-in checker timing: wall or steps [time_model]")
      ->check(CLI::IsMember({"wall", "steps"}));
  add_override(app, g, "--step-seconds", "step_seconds", "Seconds charged per step under --time-model steps");
  add_override(app, g, "--timeout", "timeout", "Per-query verifier timeout in seconds");
  add_override(app, g, "--workers,-j", "workers", "Instances processed concurrently");
  app.add_flag_callback(
      "--serial", [&g] { g.overrides["workers"] = "1"; }, "One instance at a time, for timing-sensitive runs");
  add_override(app, g, "--seed", "seed", "Seed for the train/validation split");
  add_override(app, g, "--output,-o", "output_dir", "Output directory");
  add_override(app, g, "--candidates,-N", "n_candidates", "Simplification candidates per request");
  add_override(app, g, "--verbosity-threshold", "verbosity_threshold", "Length above which invariants are simplified");
  add_override(app, g, "--baseline-runs,-k", "baseline_runs", "Baseline repetitions; the median is used");
  add_override(app, g, "--grading-runs", "grading_runs", "Split repetitions per graded candidate");
  add_override(app, g, "--hard-threshold", "hard_threshold", "Baseline seconds above which an instance is hard");
  add_override(app, g, "--verifier-command", "external.command", "External verifier command containing {file}");
  app.add_flag_callback(
      "--keep-artifacts", [&g] { g.overrides["external.keep_artifacts"] = "true"; },
      "Keep external verifier inputs and transcripts [external.keep_artifacts]");
  add_override(app, g, "--llm-url", "llm.base_url", "OpenAI-compatible endpoint");
  add_override(app, g, "--llm-model", "llm.model", "Model name");
  add_override(app, g, "--llm-stub-dir", "llm.stub_dir", "Answer LLM prompts from canned files in this directory");
  app.add_option_function<std::vector<std::string>>(
      "--set",
      [&g](const std::vector<std::string>& items) {
        for (const auto& item : items) {
          const auto eq = item.find('=');
          if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value, got " + item);
          g.overrides[item.substr(0, eq)] = item.substr(eq + 1);
        }
      },
      "Set any config key, e.g. --set llm.temperature=0.2");
  app.add_flag("--verbose,-v", g.verbose, "Debug logging, including annotated verifier queries");
  app.add_flag("--quiet,-q", g.quiet, "Warnings and errors only");

  std::string in_path, out_path, instances_path, invariants_path, dataset_path;
  std::optional<std::string> from_file;
  bool stats_json = false;

  auto* normalize = app.add_subcommand("normalize", "Normalize raw invariants into V1 records");
  normalize->add_option("input", in_path, "Raw invariants, one per line")->required();
  normalize->add_option("output", out_path, "V1 JSONL to write")->required();

  auto* curate = app.add_subcommand("curate", "Run the V0 -> V1 -> V2 pipeline");
  curate->add_option("instances", instances_path, "Raw-instance JSONL")->required()->check(CLI::ExistingFile);

  auto* grade = app.add_subcommand("grade", "Grade candidate invariants against instances");
  grade->add_option("instances", instances_path, "Instance JSONL")->required()->check(CLI::ExistingFile);
  grade->add_option("invariants", invariants_path, "Candidate JSONL with id and invariant")
      ->required()
      ->check(CLI::ExistingFile);

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a model (or recorded outputs) on instances");
  evaluate->add_option("instances", instances_path, "Instance JSONL")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--from-file", from_file, "Replay recorded model outputs instead of querying a model")
      ->check(CLI::ExistingFile);

  auto* stats = app.add_subcommand("stats", "Summarize a curated dataset");
  stats->add_option("dataset", dataset_path, "Curated JSONL")->required()->check(CLI::ExistingFile);
  stats->add_flag("--json", stats_json, "Print JSON");

  CLI11_PARSE(app, argc, argv);

  spdlog::set_default_logger(spdlog::stderr_color_mt("invkit"));
  spdlog::set_pattern("%H:%M:%S %^%l%$ %v");
  spdlog::set_level(g.verbose ? spdlog::level::debug : g.quiet ? spdlog::level::warn : spdlog::level::info);

  try {
    if (*normalize) {
      const auto summary = invkit::cmd_normalize(in_path, out_path);
      std::cout << invkit::format_normalize_summary(summary);
      return 0;
    }
    if (*stats) {
      std::cout << invkit::cmd_stats(dataset_path, stats_json);
      return 0;
    }

    const invkit::ToolConfig config = invkit::resolve_config(g.config_file, g.overrides);
    spdlog::debug("effective config: {}", invkit::to_json(config).dump());
    if (*curate) {
      const auto skipped = invkit::cmd_curate(config, instances_path);
      std::cout << "skipped " << skipped << " instance(s); see " << config.output_dir << "/manifest.json\n";
    } else if (*grade) {
      const auto failed = invkit::cmd_grade(config, instances_path, invariants_path);
      std::cout << "ungraded " << failed << " candidate(s); see " << config.output_dir << "/grades.jsonl\n";
    } else if (*evaluate) {
      std::cout << invkit::cmd_evaluate(config, instances_path, from_file);
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
