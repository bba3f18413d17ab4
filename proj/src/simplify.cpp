#include "invkit/simplify.hpp"

#include <set>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "invkit/errors.hpp"
#include "invkit/normalize.hpp"

namespace invkit {

using nlohmann::json;

std::optional<std::string> first_json_object(std::string_view text) {
  for (std::size_t start = text.find('{'); start != std::string_view::npos;
       start = text.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
      const char c = text[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}' && --depth == 0) {
        std::string candidate(text.substr(start, i - start + 1));
        if (json::accept(candidate)) return candidate;
        break;
      }
    }
  }
  return std::nullopt;
}

PromptPair build_simplify_prompt(const SimplifyContext& ctx) {
  const std::string invariant = ctx.normalized_predicate ? print_minimal(ctx.normalized_predicate) : "";
  return {std::string(prompts::kSimplifySystem),
          fill_template(prompts::kSimplifyUser, {{"program", ctx.program_text},
                                                 {"invariant", invariant},
                                                 {"marker", ctx.marker}})};
}

SimplifyResponse parse_simplify_response(std::string_view text) {
  for (unsigned char c : text) {
    if (c >= 0x80) throw MalformedResponse("response contains non-ASCII characters");
  }
  const auto object = first_json_object(text);
  if (!object) throw MalformedResponse("no JSON object in response");
  const json doc = json::parse(*object);
  if (doc.size() != 2 || !doc.contains("simplified_invariant") || !doc.contains("rationale")) {
    throw MalformedResponse("expected exactly the keys simplified_invariant and rationale");
  }
  if (!doc["simplified_invariant"].is_string() || !doc["rationale"].is_string()) {
    throw MalformedResponse("simplified_invariant and rationale must be strings");
  }
  SimplifyResponse r;
  r.simplified_invariant = doc["simplified_invariant"].get<std::string>();
  r.rationale = doc["rationale"].get<std::string>();
  try {
    r.predicate = parse_predicate(r.simplified_invariant);
  } catch (const ParseError& e) {
    throw MalformedResponse(std::string("invariant does not parse: ") + e.what());
  }
  return r;
}

namespace {

SimplifiedCandidate keep(const GradedCandidate& g, std::string rationale) {
  return {g.predicate, g.text, g.grade, std::move(rationale), g};
}

}  // namespace

SimplifyResult simplify_invariant(const VerificationQuery& query, const SimplifyContext& ctx,
                                  double t_b, const LlmClient& llm, const OracleBackend& backend,
                                  const GradeOptions& options) {
  SimplifyResult result;
  const PredExpr& phi = ctx.normalized_predicate;
  if (!phi || is_degenerate(phi)) return result;

  result.stats.verbose = expr_metrics(phi).char_length > ctx.verbosity_threshold;
  if (result.stats.verbose) {
    std::vector<std::string> replies;
    try {
      const PromptPair prompt = build_simplify_prompt(ctx);
      replies = llm.complete(prompt.system, prompt.user, ctx.n_candidates);
    } catch (const TransportError& e) {
      result.stats.llm_failed = true;
      spdlog::warn("[{}] simplification request failed: {}", ctx.marker, e.what());
    }
    result.stats.received = replies.size();

    std::set<std::string> seen;
    for (const std::string& reply : replies) {
      SimplifyResponse response;
      try {
        response = parse_simplify_response(reply);
      } catch (const MalformedResponse& e) {
        ++result.stats.malformed;
        spdlog::debug("[{}] dropped candidate: {}", ctx.marker, e.what());
        continue;
      }
      if (!seen.insert(print_minimal(response.predicate)).second) {
        ++result.stats.duplicates;
        continue;
      }
      if (is_degenerate(normalize(response.predicate).expr)) {
        ++result.stats.degenerate;
        continue;
      }
      const GradedCandidate g =
          grade_candidate(query, ctx.marker, response.predicate, t_b, backend, options);
      ++result.stats.graded;
      if (g.grade >= 2) result.kept.push_back(keep(g, response.rationale));
    }
  }

  if (result.kept.empty()) {
    result.stats.fallback = true;
    const GradedCandidate g = grade_candidate(query, ctx.marker, phi, t_b, backend, options);
    result.stats.fallback_grade = g.grade;
    if (g.grade >= 2) {
      result.kept.push_back(keep(g, ""));
    } else {
      spdlog::info("[{}] normalized invariant graded {}, no sample emitted", ctx.marker, g.grade);
    }
  }
  return result;
}

}  // namespace invkit
