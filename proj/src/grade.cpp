#include "invkit/grade.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "invkit/errors.hpp"

namespace invkit {

int quality_grade(bool syntax_valid, Outcome v1, Outcome v2, double t_v, double t_b) {
  if (!syntax_valid || v1 != Outcome::True) return 0;
  if (v2 != Outcome::True) return 1;
  if (t_v >= t_b) return 2;
  return 3;
}

GradedCandidate grade_candidate(const VerificationQuery& query, const std::string& marker,
                                const PredExpr& predicate, double t_b,
                                const OracleBackend& backend, const GradeOptions& options) {
  if (!(t_b > 0)) throw std::invalid_argument("grade_candidate: t_b must be positive");
  GradedCandidate out;
  out.t_b = t_b;
  out.predicate = predicate;
  if (!predicate) {
    out.diagnostic = "no predicate";
    return out;
  }
  out.text = print_minimal(predicate);

  const Property candidate{marker, predicate};
  const int runs = std::max(1, options.grading_runs);
  std::vector<SplitResult> results;
  results.reserve(static_cast<std::size_t>(runs));
  for (int i = 0; i < runs; ++i) results.push_back(run_split(backend, query, candidate, options.timeout));
  std::sort(results.begin(), results.end(),
            [](const SplitResult& a, const SplitResult& b) { return a.t_v < b.t_v; });
  const SplitResult& chosen = results[(results.size() - 1) / 2];

  out.grade = quality_grade(true, chosen.v1.outcome, chosen.v2.outcome, chosen.t_v, t_b);
  if (!chosen.v1.diagnostic.empty()) out.diagnostic = "v1: " + chosen.v1.diagnostic;
  if (!chosen.v2.diagnostic.empty()) {
    if (!out.diagnostic.empty()) out.diagnostic += "; ";
    out.diagnostic += "v2: " + chosen.v2.diagnostic;
  }
  out.split = chosen;
  return out;
}

GradedCandidate grade_candidate(const VerificationQuery& query, const std::string& marker,
                                std::string_view text, double t_b, const OracleBackend& backend,
                                const GradeOptions& options) {
  if (!(t_b > 0)) throw std::invalid_argument("grade_candidate: t_b must be positive");
  PredExpr parsed;
  try {
    parsed = parse_predicate(text);
  } catch (const ParseError& e) {
    GradedCandidate out;
    out.t_b = t_b;
    out.text = std::string(text);
    out.diagnostic = e.what();
    return out;
  }
  return grade_candidate(query, marker, parsed, t_b, backend, options);
}

}  // namespace invkit
