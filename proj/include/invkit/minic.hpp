#pragma once

// Built-in verification backend: exhaustive concrete execution of a small C
// subset. Every nondeterministic value must have a finite range, either from
// its type (_Bool, char) or from assume() statements right after it is drawn.
// The checker answers TRUE only after every trace finished without reaching an
// error, so it never claims safety it has not established.

#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "invkit/program.hpp"
#include "invkit/verify.hpp"

namespace invkit {

class UnsupportedConstruct : public ProgramError {
 public:
  UnsupportedConstruct(const std::string& what, std::size_t line)
      : ProgramError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

enum class TimeModel {
  Wall,   // report measured compute time
  Steps,  // report executed steps * step_seconds (reproducible)
};

struct BuiltinLimits {
  std::size_t max_states = 200000;  // traces, i.e. nondet valuations explored
  std::size_t max_steps = 1000000;  // per trace
  TimeModel time_model = TimeModel::Wall;
  double step_seconds = 1e-6;
};

struct BuiltinReport {
  Verdict verdict;
  // Nondet choices (variable name, value) of the failing trace, in draw order.
  std::vector<std::pair<std::string, Integer>> counterexample;
  std::size_t traces = 0;
  std::size_t total_steps = 0;
};

/// Supported: integer declarations (int, long, long long, short, char, _Bool,
/// signed/unsigned variants), globals, =, +=, -=, *=, /=, %=, ++, --, if/else,
/// while, do-while, for, break, continue, return, labels, blocks, and calls to
/// assert/__VERIFIER_assert, assume/__VERIFIER_assume/assume_abort_if_not,
/// reach_error/__VERIFIER_error, abort/exit, marker calls and
/// __VERIFIER_nondet_*(). Bodies of functions other than main are ignored;
/// calling one is unsupported. Integers are unbounded.
///
/// A step is one executed statement or one evaluated loop/branch condition.
BuiltinReport builtin_check(std::string_view source, const BuiltinLimits& limits,
                            double timeout = std::numeric_limits<double>::infinity());

class BuiltinBackend final : public OracleBackend {
 public:
  explicit BuiltinBackend(BuiltinLimits limits = {}) : limits_(limits) {}

  OracleResult check(const std::string& source, double timeout) const override;
  std::string name() const override { return "builtin"; }
  const BuiltinLimits& limits() const noexcept { return limits_; }

 private:
  BuiltinLimits limits_;
};

}  // namespace invkit
