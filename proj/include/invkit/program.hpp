#pragma once

// C programs instrumented with loop markers, properties over them, and the
// assume/assert annotation that turns a verification query into plain C.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "invkit/predicate.hpp"

namespace invkit {

/// Location name of the program's own assertion (the postcondition q).
inline constexpr std::string_view kTargetLocation = "TARGET";

/// True for names of the form INVARIANT_MARKER_<digits>.
bool is_marker_name(std::string_view name);

class ProgramError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownMarker : public ProgramError {
 public:
  explicit UnknownMarker(const std::string& marker)
      : ProgramError("unknown marker '" + marker + "'"), marker_(marker) {}
  const std::string& marker() const noexcept { return marker_; }

 private:
  std::string marker_;
};

/// Byte range [begin, end) of a statement in the source, plus its line.
struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t line = 0;
};

struct MarkerSite {
  std::string name;
  SourceSpan span;  // covers `INVARIANT_MARKER_k();`
};

/// An `assert(...)` / `__VERIFIER_assert(...)` call in the program body.
struct TargetSite {
  SourceSpan span;
  std::string condition_text;
  PredExpr predicate;  // null when the condition is outside the predicate grammar
};

class Program {
 public:
  /// Locates marker calls and assertion calls. Throws ProgramError when a
  /// marker name occurs more than once or the text does not lex.
  static Program from_source(std::string source);

  const std::string& source() const noexcept { return source_; }
  const std::vector<MarkerSite>& markers() const noexcept { return markers_; }
  const std::vector<TargetSite>& targets() const noexcept { return targets_; }

  const MarkerSite* find_marker(std::string_view name) const noexcept;
  bool has_location(std::string_view location) const noexcept;

  /// Predicate of the last assertion, the one treated as q.
  PredExpr target_predicate() const;

 private:
  std::string source_;
  std::vector<MarkerSite> markers_;
  std::vector<TargetSite> targets_;
};

/// A pair (location, predicate). The location is a marker name or
/// kTargetLocation.
struct Property {
  std::string location;
  PredExpr predicate;
};

struct VerificationQuery {
  std::vector<Property> preconditions;
  Program program;
  Property postcondition;

  /// The query ⟨∅, P, q⟩ where q is the program's own assertion.
  static VerificationQuery from_program(Program program);
};

/// Instantiates a query as C source. Every assume-property becomes
/// `assume(φ);` at its location, the assertion becomes `assert(φ);`, and marker
/// calls without a property are dropped. If the assertion sits at a marker the
/// program's own assertions are removed; if it is the target location they
/// stay. Line numbers of the original program are kept. Helper definitions for
/// assume/assert/reach_error are prepended when the program lacks them.
/// Throws UnknownMarker.
std::string annotate(const Program& program, const std::vector<Property>& assumes,
                     const Property& assertion);

}  // namespace invkit
