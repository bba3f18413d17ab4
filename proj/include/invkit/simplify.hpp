#pragma once

// LLM-driven simplification of normalized invariants, filtered by grade.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "invkit/grade.hpp"
#include "invkit/llm.hpp"
#include "invkit/prompts.hpp"

namespace invkit {

class MalformedResponse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Text of the first balanced `{...}` in `text` that parses as a JSON object.
/// Prose and code fences around it are ignored.
std::optional<std::string> first_json_object(std::string_view text);

struct SimplifyContext {
  std::string program_text;  // program with its loop markers
  PredExpr normalized_predicate;
  std::string marker;
  int n_candidates = 4;
  std::size_t verbosity_threshold = 64;  // η, in characters of print_minimal
};

PromptPair build_simplify_prompt(const SimplifyContext& ctx);

struct SimplifyResponse {
  std::string simplified_invariant;
  std::string rationale;
  PredExpr predicate;
};

/// Throws MalformedResponse on non-ASCII text, no JSON object, keys other than
/// exactly {simplified_invariant, rationale}, or an invariant that does not
/// parse.
SimplifyResponse parse_simplify_response(std::string_view text);

struct SimplifiedCandidate {
  PredExpr predicate;
  std::string text;
  int grade = 0;
  std::string rationale;  // empty for the normalized invariant itself
  GradedCandidate graded;
};

struct SimplifyStats {
  bool verbose = false;
  bool llm_failed = false;
  std::size_t received = 0;
  std::size_t malformed = 0;
  std::size_t duplicates = 0;
  std::size_t degenerate = 0;
  std::size_t graded = 0;
  bool fallback = false;
  std::optional<int> fallback_grade;
};

struct SimplifyResult {
  std::vector<SimplifiedCandidate> kept;  // all with grade >= 2, distinct texts
  SimplifyStats stats;
};

/// The V2 stage. A degenerate φ_norm yields nothing. A verbose one
/// (|print_minimal| > η) is sent to the model for N candidates, which are
/// deduplicated on their minimal printing, stripped of degenerate ones and
/// graded; grade >= 2 survives. If nothing survived, or φ_norm was short,
/// φ_norm itself is graded and kept at grade >= 2. Failures only shrink the
/// result.
SimplifyResult simplify_invariant(const VerificationQuery& query, const SimplifyContext& ctx,
                                  double t_b, const LlmClient& llm, const OracleBackend& backend,
                                  const GradeOptions& options = {});

}  // namespace invkit
