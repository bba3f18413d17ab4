#include "invkit/external.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

namespace invkit {

namespace fs = std::filesystem;

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::string replace_all(std::string text, std::string_view from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

fs::path make_work_dir(const ExternalBackendConfig& config) {
  static std::atomic<unsigned> counter{0};
  const fs::path base = config.artifact_dir.empty() ? fs::temp_directory_path() : fs::path(config.artifact_dir);
  fs::create_directories(base);
  for (int attempt = 0; attempt < 100; ++attempt) {
    const fs::path dir = base / ("invkit-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::error_code ec;
    if (fs::create_directory(dir, ec)) return dir;
  }
  throw SpawnFailure("cannot create a work directory under " + base.string());
}

struct ProcessResult {
  std::string output;
  int exit_code = -1;
  bool timed_out = false;
};

ProcessResult run_shell(const std::string& command, double timeout) {
  int fds[2];
  if (::pipe(fds) != 0) throw SpawnFailure(std::string("pipe: ") + std::strerror(errno));
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw SpawnFailure(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::setpgid(0, 0);  // own process group so the whole tree can be killed
    ::dup2(fds[1], STDOUT_FILENO);
    ::dup2(fds[1], STDERR_FILENO);
    ::close(fds[0]);
    ::close(fds[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(fds[1]);

  ProcessResult result;
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout);
  char buf[4096];
  for (;;) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      result.timed_out = true;
      break;
    }
    pollfd pfd{fds[0], POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (ready < 0 && errno != EINTR) break;
    if (ready <= 0) continue;
    const ssize_t n = ::read(fds[0], buf, sizeof buf);
    if (n <= 0) break;  // EOF: every writer closed the pipe
    result.output.append(buf, static_cast<std::size_t>(n));
  }
  if (result.timed_out) ::killpg(pid, SIGKILL);
  ::close(fds[0]);

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (result.timed_out) {
    ::killpg(pid, SIGKILL);  // stragglers that outlived the shell
  } else if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.exit_code = 128 + WTERMSIG(status);
  }
  return result;
}

std::string tail(const std::string& text, std::size_t n) {
  return text.size() <= n ? text : "..." + text.substr(text.size() - n);
}

}  // namespace

ExternalBackend::ExternalBackend(ExternalBackendConfig config) : config_(std::move(config)) {
  if (config_.command.find("{file}") == std::string::npos) {
    throw std::invalid_argument("external backend command needs a {file} placeholder");
  }
  try {
    true_re_ = std::regex(config_.true_regex);
    false_re_ = std::regex(config_.false_regex);
    unknown_re_ = std::regex(config_.unknown_regex);
  } catch (const std::regex_error& e) {
    throw std::invalid_argument(std::string("bad verdict regex: ") + e.what());
  }
}

Outcome ExternalBackend::classify(const std::string& output, bool& matched) const {
  matched = false;
  Outcome outcome = Outcome::Unknown;
  std::istringstream lines(output);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (std::regex_search(line, true_re_)) {
      outcome = Outcome::True;
      matched = true;
    } else if (std::regex_search(line, false_re_)) {
      outcome = Outcome::False;
      matched = true;
    } else if (std::regex_search(line, unknown_re_)) {
      outcome = Outcome::Unknown;
      matched = true;
    }
  }
  return outcome;
}

OracleResult ExternalBackend::check(const std::string& source, double timeout) const {
  const fs::path dir = make_work_dir(config_);
  const fs::path file = dir / "query.c";
  {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw SpawnFailure("cannot write " + file.string());
    out << source;
  }
  std::string command = replace_all(config_.command, "{file}", shell_quote(file.string()));
  if (!config_.memory_limit_wrapper.empty()) command = config_.memory_limit_wrapper + " " + command;

  ProcessResult proc;
  try {
    proc = run_shell(command, timeout);
  } catch (...) {
    if (!config_.keep_artifacts) fs::remove_all(dir);
    throw;
  }

  OracleResult r;
  if (proc.timed_out) {
    r.timed_out = true;
    r.diagnostic = "timeout after " + std::to_string(timeout) + " s";
  } else {
    bool matched = false;
    r.outcome = classify(proc.output, matched);
    if (!matched) {
      r.diagnostic = "no verdict in verifier output (exit " + std::to_string(proc.exit_code) +
                     "): " + tail(proc.output, 400);
    }
  }
  if (config_.keep_artifacts) {
    std::ofstream(dir / "output.txt", std::ios::binary) << proc.output;
    spdlog::debug("kept verifier artifacts in {}", dir.string());
  } else {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  return r;
}

OracleResult external_check(const ExternalBackendConfig& config, const std::string& source,
                            double timeout) {
  return ExternalBackend(config).check(source, timeout);
}

}  // namespace invkit
