#include <chrono>
#include <filesystem>
#include <thread>

#include "doctest.h"
#include "invkit/minic.hpp"
#include "invkit/verify.hpp"
#include "support/fixtures.hpp"
#include "support/reference_interp.hpp"
#include "support/stub_backends.hpp"

using namespace invkit;
namespace fs = std::filesystem;

namespace {

Program fixture_program(const std::string& name) {
  return Program::from_source(testing::read_fixture(name));
}

std::string expected_outcome(const std::string& source) {
  const auto pos = source.find("// expect: ");
  REQUIRE(pos != std::string::npos);
  const auto end = source.find('\n', pos);
  return source.substr(pos + 11, end - pos - 11);
}

BuiltinLimits small_limits() {
  BuiltinLimits l;
  l.max_steps = 20000;
  return l;
}

}  // namespace

TEST_CASE("decide follows the decision table") {
  const Outcome all[] = {Outcome::True, Outcome::False, Outcome::Unknown};
  for (Outcome v1 : all) {
    for (Outcome v2 : all) {
      Outcome expected = Outcome::Unknown;
      if (v1 == Outcome::True && v2 == Outcome::True) expected = Outcome::True;
      if (v2 == Outcome::False) expected = Outcome::False;
      CHECK(decide(v1, v2) == expected);
    }
  }
  CHECK(decide(Outcome::False, Outcome::False) == Outcome::False);
  CHECK(decide(Outcome::True, Outcome::Unknown) == Outcome::Unknown);
  CHECK(to_string(Outcome::Unknown) == "UNKNOWN");
  CHECK(parse_outcome("true") == Outcome::True);
  CHECK_FALSE(parse_outcome("maybe").has_value());
}

TEST_CASE("Program locates markers and assertions") {
  const auto p = fixture_program("minic/01_running_example.c");
  REQUIRE(p.markers().size() == 1);
  CHECK(p.markers()[0].name == "INVARIANT_MARKER_1");
  CHECK(p.markers()[0].span.line == 7);
  REQUIRE(p.targets().size() == 1);
  CHECK(print_minimal(p.target_predicate()) == "x > y");
  CHECK(p.has_location(kTargetLocation));

  const auto cohen = fixture_program("minic/11_cohendiv.c");
  CHECK(cohen.markers().size() == 2);
  REQUIRE(cohen.targets().size() == 1);  // the definition of assert is not a call
  CHECK(print_minimal(cohen.target_predicate()) == "r >= 2*y*a");

  CHECK_THROWS_AS(Program::from_source("int main() { INVARIANT_MARKER_1(); INVARIANT_MARKER_1(); }"),
                  ProgramError);
}

TEST_CASE("annotate: running example correctness, sufficiency and baseline") {
  const auto p = fixture_program("minic/01_running_example.c");
  const auto lines = [](const std::string& s) {
    return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
  };
  const Property inv{"INVARIANT_MARKER_1", parse_predicate("5*x+3*y==300")};
  const Property q{std::string(kTargetLocation), p.target_predicate()};

  const std::string correctness = annotate(p, {}, inv);
  CHECK(correctness.find("assert(5*x + 3*y == 300);") != std::string::npos);
  CHECK(correctness.find("assert(x > y)") == std::string::npos);
  CHECK(correctness.find("INVARIANT_MARKER") == std::string::npos);
  CHECK(correctness.find("#line 1\n") != std::string::npos);
  // Body lines are preserved after the #line directive.
  const auto body = correctness.substr(correctness.find("#line 1\n") + 8);
  CHECK(lines(body) == lines(p.source()));

  const std::string sufficiency = annotate(p, {inv}, q);
  CHECK(sufficiency.find("assume(5*x + 3*y == 300);") != std::string::npos);
  CHECK(sufficiency.find("assert(x > y);") != std::string::npos);

  const std::string baseline = annotate(p, {}, q);
  const auto base_body = baseline.substr(baseline.find("#line 1\n") + 8);
  std::string expected = p.source();
  expected.erase(p.markers()[0].span.begin, p.markers()[0].span.end - p.markers()[0].span.begin);
  CHECK(base_body == expected);

  CHECK_THROWS_AS(annotate(p, {}, Property{"INVARIANT_MARKER_9", parse_predicate("x")}), UnknownMarker);
}

TEST_CASE("annotate: helpers only when absent, placeholders, literals") {
  const auto cohen = fixture_program("minic/11_cohendiv.c");
  const std::string s = annotate(cohen, {}, Property{"INVARIANT_MARKER_2", parse_predicate("a*y == b")});
  CHECK(s.find("void assert(int cond) { if (!(cond))") == s.rfind("void assert(int cond) { if (!(cond))"));
  CHECK(s.find("extern void abort(void);") != std::string::npos);

  const auto p = Program::from_source(
      "int main() { int x = 1; while (x < 3) INVARIANT_MARKER_1(); if (x) assert(x == 1); }");
  const std::string out = annotate(p, {}, Property{"INVARIANT_MARKER_1", make_bool(true)});
  CHECK(out.find("assert(1);") != std::string::npos);
  CHECK(out.find("if (x) ;") != std::string::npos);

  // Assumes precede the assertion at a shared location.
  const std::string both =
      annotate(p, {Property{"INVARIANT_MARKER_1", parse_predicate("x > 0")}},
               Property{"INVARIANT_MARKER_1", parse_predicate("x < 5")});
  CHECK(both.find("assume(x > 0); assert(x < 5);") != std::string::npos);
}

TEST_CASE("builtin backend: fixture verdicts and agreement with the reference executor") {
  int compared = 0;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(testing::fixture_path("minic"))) {
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    const std::string source = testing::read_fixture("minic/" + path.filename().string());
    const std::string expected = expected_outcome(source);
    // Run the baseline query so the annotation prelude is exercised too.
    const auto program = Program::from_source(source);
    const std::string query =
        program.targets().empty() ? source : baseline_source(VerificationQuery::from_program(program));
    const auto report = builtin_check(query, small_limits());
    INFO(path.filename().string() << ": " << report.verdict.diagnostic);
    CHECK(to_string(report.verdict.outcome) == expected);

    const auto ref = testing::ref::check(query, 60, 20000);
    const Outcome ref_outcome = ref == testing::ref::Result::Safe     ? Outcome::True
                                : ref == testing::ref::Result::Unsafe ? Outcome::False
                                                                      : Outcome::Unknown;
    CHECK(ref_outcome == report.verdict.outcome);
    ++compared;
  }
  CHECK(compared >= 20);
}

TEST_CASE("builtin backend: counterexamples, limits, unsupported input") {
  const auto hit = builtin_check(testing::read_fixture("minic/06_hits_seven.c"), {});
  CHECK(hit.verdict.outcome == Outcome::False);
  REQUIRE(hit.counterexample.size() == 1);
  CHECK(hit.counterexample[0].first == "x");
  CHECK(hit.counterexample[0].second == 7);
  CHECK(hit.traces == 8);

  const auto unbounded = builtin_check(
      "int main() { int x = __VERIFIER_nondet_int(); assume(x > 0); assert(x != 0); return 0; }", {});
  CHECK(unbounded.verdict.outcome == Outcome::Unknown);
  CHECK(unbounded.verdict.diagnostic.find("unbounded") != std::string::npos);

  BuiltinLimits few;
  few.max_states = 3;
  const auto capped = builtin_check(testing::read_fixture("minic/05_square_nonneg.c"), few);
  CHECK(capped.verdict.outcome == Outcome::Unknown);

  const auto pointer = builtin_check("int main() { int *p; return 0; }", {});
  CHECK(pointer.verdict.outcome == Outcome::Unknown);
  CHECK(pointer.verdict.diagnostic.find("unsupported") != std::string::npos);

  const auto call = builtin_check("int f(int a) { return a; } int main() { f(1); return 0; }", {});
  CHECK(call.verdict.outcome == Outcome::Unknown);

  const auto uninit = builtin_check("int main() { int a; assert(a == 0); return 0; }", {});
  CHECK(uninit.verdict.outcome == Outcome::Unknown);

  BuiltinLimits steps;
  steps.time_model = TimeModel::Steps;
  steps.step_seconds = 0.5;
  const auto slow = builtin_check(testing::read_fixture("minic/01_running_example.c"), steps, 10.0);
  CHECK(slow.verdict.outcome == Outcome::Unknown);
  CHECK(slow.verdict.timed_out);
}

TEST_CASE("builtin backend: steps time model is reproducible") {
  BuiltinLimits limits;
  limits.time_model = TimeModel::Steps;
  limits.step_seconds = 0.001;
  BuiltinBackend backend(limits);
  const std::string src = testing::read_fixture("minic/01_running_example.c");
  const auto a = run_query(backend, src, 600);
  const auto b = run_query(backend, src, 600);
  CHECK(a.outcome == Outcome::True);
  CHECK(a.wall_time == b.wall_time);
  CHECK(a.wall_time > 0.0);
}

TEST_CASE("run_split on the running example") {
  BuiltinBackend backend;
  const auto query = VerificationQuery::from_program(fixture_program("minic/01_running_example.c"));
  const auto good = run_split(backend, query, {"INVARIANT_MARKER_1", parse_predicate("5*x + 3*y == 300")}, 60);
  CHECK(good.v1.outcome == Outcome::True);
  CHECK(good.v2.outcome == Outcome::True);
  CHECK(good.t_v == std::max(good.v1.wall_time, good.v2.wall_time));

  const auto bad = run_split(backend, query, {"INVARIANT_MARKER_1", parse_predicate("x < 0")}, 60);
  CHECK(bad.v1.outcome == Outcome::False);

  const auto trivial = run_split(backend, query, {"INVARIANT_MARKER_1", make_bool(true)}, 60);
  CHECK(trivial.v1.outcome == Outcome::True);
  CHECK(trivial.v2.outcome == Outcome::True);

  CHECK_THROWS_AS(run_split(backend, query, {std::string(kTargetLocation), make_bool(true)}, 60),
                  UnknownMarker);
}

TEST_CASE("run_split: division inner-loop candidate over all valuations") {
  BuiltinBackend backend;
  const auto query = VerificationQuery::from_program(fixture_program("minic/11_cohendiv.c"));
  const auto [v1_src, v2_src] = split_sources(query, {"INVARIANT_MARKER_2", parse_predicate("a*y == b")});
  const auto report = builtin_check(v1_src, {});
  CHECK(report.verdict.outcome == Outcome::True);
  // x in [0,50] times y in [1,50].
  CHECK(report.traces == 51 * 50);
  const auto split = run_split(backend, query, {"INVARIANT_MARKER_2", parse_predicate("a*y == b")}, 60);
  CHECK(decide(split.v1, split.v2) == Outcome::True);
}

TEST_CASE("run_query: timeouts and backend failures") {
  testing::SleepBackend sleepy(0.3);
  const auto v = run_query(sleepy, "", 0.05);
  CHECK(v.outcome == Outcome::Unknown);
  CHECK(v.timed_out);
  CHECK(v.wall_time == 0.05);

  testing::ThrowingBackend broken;
  const auto w = run_query(broken, "", 1.0);
  CHECK(w.outcome == Outcome::Unknown);
  CHECK(w.diagnostic.find("boom") != std::string::npos);
}

TEST_CASE("run_split issues both queries concurrently") {
  testing::SleepBackend sleepy(0.3);
  const auto query = VerificationQuery::from_program(fixture_program("minic/01_running_example.c"));
  const auto start = std::chrono::steady_clock::now();
  const auto r = run_split(sleepy, query, {"INVARIANT_MARKER_1", parse_predicate("x >= 0")}, 10);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(r.t_v < 0.45);
  CHECK(elapsed < 0.45);
  CHECK(r.t_v == std::max(r.v1.wall_time, r.v2.wall_time));
  CHECK(sleepy.max_in_flight() == 2);
}

TEST_CASE("baseline_median") {
  testing::ScriptedBackend scripted({{Outcome::True, 3.0}, {Outcome::True, 1.0}, {Outcome::True, 2.0}});
  const auto query = VerificationQuery::from_program(fixture_program("minic/01_running_example.c"));
  const auto b = baseline_median(scripted, query, 3, 600);
  CHECK(b.t_b == 2.0);
  CHECK_FALSE(b.all_timed_out);
  CHECK(b.outcome == Outcome::True);

  CHECK(lower_median({4.0, 1.0, 3.0, 2.0}) == 2.0);

  testing::ScriptedBackend timeouts({{Outcome::Unknown, 0.0, true}});
  const auto t = baseline_median(timeouts, query, 3, 600);
  CHECK(t.all_timed_out);
  CHECK(t.t_b == 600);
}
