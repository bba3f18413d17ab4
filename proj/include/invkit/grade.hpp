#pragma once

// Quality grade Q of a candidate invariant and the grading procedure.

#include <optional>
#include <string>
#include <string_view>

#include "invkit/verify.hpp"

namespace invkit {

struct GradedCandidate {
  PredExpr predicate;  // null when the candidate text did not parse
  std::string text;    // minimal printing, or the raw text when unparsable
  int grade = 0;
  std::optional<SplitResult> split;  // absent when rejected before verification
  double t_b = 0.0;
  std::string diagnostic;
};

/// Closed form of Q:
///   0  syntax invalid, or v1 is not TRUE
///   1  v1 TRUE, v2 not TRUE
///   2  both TRUE and t_v >= t_b
///   3  both TRUE and t_v < t_b
int quality_grade(bool syntax_valid, Outcome v1, Outcome v2, double t_v, double t_b);

struct GradeOptions {
  double timeout = 600.0;
  // Number of split runs per candidate. With more than one, the run with the
  // lower-median t_v supplies verdicts and timing.
  int grading_runs = 1;
};

/// Grades `predicate` placed at `marker`. Backend trouble shows up as UNKNOWN
/// verdicts and lowers the grade; it is never thrown. Throws
/// std::invalid_argument when t_b <= 0 and UnknownMarker for a bad marker.
GradedCandidate grade_candidate(const VerificationQuery& query, const std::string& marker,
                                const PredExpr& predicate, double t_b,
                                const OracleBackend& backend, const GradeOptions& options = {});

/// Same, starting from text. Text that fails parse_predicate (including any
/// side-effecting operator) is grade 0 without a verifier call.
GradedCandidate grade_candidate(const VerificationQuery& query, const std::string& marker,
                                std::string_view text, double t_b, const OracleBackend& backend,
                                const GradeOptions& options = {});

}  // namespace invkit
