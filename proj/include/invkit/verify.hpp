#pragma once

// Verification oracles and the split correctness/sufficiency procedure.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "invkit/program.hpp"

namespace invkit {

enum class Outcome { True, False, Unknown };

std::string_view to_string(Outcome outcome);
/// Accepts "TRUE", "FALSE", "UNKNOWN" (case-insensitive).
std::optional<Outcome> parse_outcome(std::string_view text);

struct Verdict {
  Outcome outcome = Outcome::Unknown;
  double wall_time = 0.0;  // seconds
  bool timed_out = false;
  std::string diagnostic;
};

struct SplitResult {
  Verdict v1;  // correctness: V(A, P, I)
  Verdict v2;  // sufficiency: V(A ∪ {I}, P, q)
  double t_v = 0.0;
};

/// What a backend reports for one query.
struct OracleResult {
  Outcome outcome = Outcome::Unknown;
  bool timed_out = false;
  // Set by backends that account time themselves instead of being clocked.
  std::optional<double> reported_time;
  std::string diagnostic;
};

/// A verifier. Implementations must tolerate concurrent calls to check().
class OracleBackend {
 public:
  virtual ~OracleBackend() = default;
  virtual OracleResult check(const std::string& source, double timeout) const = 0;
  virtual std::string name() const = 0;
};

/// Runs one query and clocks it with a monotonic clock. A timeout yields
/// UNKNOWN with wall_time equal to the timeout; any exception escaping the
/// backend becomes UNKNOWN with the message as diagnostic.
Verdict run_query(const OracleBackend& backend, const std::string& annotated_source,
                  double timeout);

/// Issues V1 and V2 concurrently. Throws UnknownMarker if the candidate's
/// location is not a loop marker of the program.
SplitResult run_split(const OracleBackend& backend, const VerificationQuery& query,
                      const Property& candidate, double timeout);

/// The C source of V1 and V2, in that order.
std::pair<std::string, std::string> split_sources(const VerificationQuery& query,
                                                  const Property& candidate);

/// Source of the direct query V(A, P, q).
std::string baseline_source(const VerificationQuery& query);

/// TRUE iff both are TRUE; FALSE whenever v2 is FALSE; UNKNOWN otherwise.
Outcome decide(Outcome v1, Outcome v2);
inline Outcome decide(const Verdict& v1, const Verdict& v2) { return decide(v1.outcome, v2.outcome); }

struct BaselineResult {
  double t_b = 0.0;
  Outcome outcome = Outcome::Unknown;  // verdict of the median run
  bool all_timed_out = false;
  std::vector<Verdict> runs;
};

/// Median wall time of k runs of V(A, P, q); for even k the lower middle.
/// When every run times out, t_b is the timeout and all_timed_out is set.
BaselineResult baseline_median(const OracleBackend& backend, const VerificationQuery& query,
                               int k, double timeout);

/// Lower-middle median; 0 for an empty list.
double lower_median(std::vector<double> values);

}  // namespace invkit
