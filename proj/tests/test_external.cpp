#include <chrono>
#include <filesystem>
#include <thread>

#include "doctest.h"
#include "invkit/external.hpp"
#include "support/temp_dir.hpp"

using namespace invkit;
using invkit::testing::TempDir;

namespace {

ExternalBackendConfig with_command(std::string command) {
  ExternalBackendConfig c;
  c.command = std::move(command);
  return c;
}

}  // namespace

TEST_CASE("external backend: verdict lines") {
  CHECK(external_check(with_command("echo 'Result:'; echo TRUE # {file}"), "int main(){}", 10).outcome ==
        Outcome::True);
  CHECK(external_check(with_command("echo FALSE # {file}"), "", 10).outcome == Outcome::False);
  CHECK(external_check(with_command("echo 'FALSE(valid-deref)' # {file}"), "", 10).outcome ==
        Outcome::False);

  // The last matching line decides.
  auto r = external_check(with_command("printf 'TRUE\\nnoise\\nUNKNOWN\\n' # {file}"), "", 10);
  CHECK(r.outcome == Outcome::Unknown);
  CHECK(r.diagnostic.empty());
  r = external_check(with_command("printf 'UNKNOWN\\nTRUE\\n' # {file}"), "", 10);
  CHECK(r.outcome == Outcome::True);
}

TEST_CASE("external backend: failures carry a diagnostic") {
  const auto r = external_check(with_command("echo segfault; exit 3 # {file}"), "", 10);
  CHECK(r.outcome == Outcome::Unknown);
  CHECK_FALSE(r.timed_out);
  CHECK(r.diagnostic.find("exit 3") != std::string::npos);
  CHECK(r.diagnostic.find("segfault") != std::string::npos);

  CHECK_THROWS_AS(ExternalBackend{with_command("verify.sh")}, std::invalid_argument);
  auto bad = with_command("x {file}");
  bad.true_regex = "(";
  CHECK_THROWS_AS(ExternalBackend{bad}, std::invalid_argument);
}

TEST_CASE("external backend: the query file is passed and can be kept") {
  TempDir dir;
  auto cfg = with_command("grep -q 'assert(x > y)' {file} && echo TRUE || echo FALSE");
  cfg.artifact_dir = dir.path().string();
  CHECK(external_check(cfg, "int main() { assert(x > y); }", 10).outcome == Outcome::True);
  CHECK(external_check(cfg, "int main() { assert(x < y); }", 10).outcome == Outcome::False);
  CHECK(std::filesystem::is_empty(dir.path()));

  cfg.keep_artifacts = true;
  external_check(cfg, "int main() { assert(x > y); }", 10);
  int kept = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir.path())) {
    CHECK(std::filesystem::exists(entry.path() / "query.c"));
    CHECK(std::filesystem::exists(entry.path() / "output.txt"));
    ++kept;
  }
  CHECK(kept == 1);
}

TEST_CASE("external backend: memory wrapper prefixes the command") {
  auto cfg = with_command("echo {file} >/dev/null");
  cfg.memory_limit_wrapper = "echo TRUE;";
  CHECK(external_check(cfg, "", 10).outcome == Outcome::True);
}

TEST_CASE("external backend: timeout kills the process tree") {
  TempDir dir;
  const auto marker = dir / "survivor";
  // The background child would create the file if it outlived the kill.
  const auto cfg = with_command("(sleep 1.5; touch " + marker.string() + ") & sleep 30 # {file}");
  const auto start = std::chrono::steady_clock::now();
  const auto r = external_check(cfg, "", 0.3);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(r.timed_out);
  CHECK(r.outcome == Outcome::Unknown);
  CHECK(elapsed < 1.0);

  const ExternalBackend backend(cfg);
  const Verdict v = run_query(backend, "", 0.3);
  CHECK(v.outcome == Outcome::Unknown);
  CHECK(v.timed_out);
  CHECK(v.wall_time == doctest::Approx(0.3));

  std::this_thread::sleep_for(std::chrono::milliseconds(1800));
  CHECK_FALSE(std::filesystem::exists(marker));
}
