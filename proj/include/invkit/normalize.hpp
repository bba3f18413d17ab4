#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>

#include "invkit/predicate.hpp"

namespace invkit {

/// Rule names as they appear in NormalizationReport::rules_fired.
namespace rules {
inline constexpr const char* kTautConj = "TautConj";
inline constexpr const char* kTautRefl = "TautRefl";
inline constexpr const char* kTautConst = "TautConst";
inline constexpr const char* kTautDisj = "TautDisj";
inline constexpr const char* kContraConj = "ContraConj";
inline constexpr const char* kContraDisj = "ContraDisj";
inline constexpr const char* kContraRefl = "ContraRefl";
inline constexpr const char* kNotConst = "NotConst";
}  // namespace rules

struct NormalizationReport {
  ExprMetrics input_metrics;
  ExprMetrics output_metrics;
  std::map<std::string, std::size_t> rules_fired;
  std::size_t casts_stripped = 0;

  std::size_t total_rewrites() const;
  bool operator==(const NormalizationReport&) const = default;
};

struct Normalized {
  PredExpr expr;
  NormalizationReport report;
};

/// One bottom-up pass of the tautology/contradiction rules. Semantically
/// equivalent to the input wherever the input evaluates without error.
///
/// At each node, after its children are rewritten:
///   relations   c1 op c2 folds to a boolean (TautConst); e op e folds to true
///               for <=, >=, == (TautRefl) and to false for <, >, != (ContraRefl)
///   &&          a true operand is dropped (TautConj), a false one absorbs (ContraConj)
///   ||          a true operand absorbs (TautDisj), a false one is dropped (ContraDisj)
///   !           applied to a literal folds (NotConst)
/// Dropping a constant operand of && or || is only done when the surviving
/// operand is itself 0/1-valued, so that the integer value is unchanged.
Normalized normalize(const PredExpr& expr);

/// Replaces every cast by its operand. `stripped`, when given, receives the
/// number of casts removed.
PredExpr strip_casts(const PredExpr& expr, std::size_t* stripped = nullptr);

/// strip_casts followed by normalize; the report covers both steps and its
/// input metrics describe the raw expression.
Normalized normalize_raw(const PredExpr& expr);

/// True iff the (normalized) predicate is a constant literal.
bool is_degenerate(const PredExpr& expr);

/// Integer value of a literal node (IntLit, BoolLit, or a negated IntLit).
std::optional<Integer> literal_value(const Expr& e);

/// True when every evaluation of `e` yields 0 or 1.
bool is_boolean_valued(const Expr& e);

}  // namespace invkit
