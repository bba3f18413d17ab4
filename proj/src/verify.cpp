#include "invkit/verify.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <future>

#include <spdlog/spdlog.h>

namespace invkit {

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::True: return "TRUE";
    case Outcome::False: return "FALSE";
    case Outcome::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::optional<Outcome> parse_outcome(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "TRUE") return Outcome::True;
  if (upper == "FALSE") return Outcome::False;
  if (upper == "UNKNOWN") return Outcome::Unknown;
  return std::nullopt;
}

Verdict run_query(const OracleBackend& backend, const std::string& annotated_source,
                  double timeout) {
  using Clock = std::chrono::steady_clock;
  Verdict v;
  const auto start = Clock::now();
  OracleResult r;
  try {
    r = backend.check(annotated_source, timeout);
  } catch (const std::exception& e) {
    r.outcome = Outcome::Unknown;
    r.diagnostic = std::string(backend.name()) + " failed: " + e.what();
  }
  const double measured = std::chrono::duration<double>(Clock::now() - start).count();
  v.outcome = r.outcome;
  v.diagnostic = std::move(r.diagnostic);
  v.wall_time = r.reported_time.value_or(measured);
  if (r.timed_out || v.wall_time > timeout) {
    v.outcome = Outcome::Unknown;
    v.timed_out = true;
    v.wall_time = timeout;
    if (v.diagnostic.empty()) v.diagnostic = "timeout";
  }
  return v;
}

std::pair<std::string, std::string> split_sources(const VerificationQuery& query,
                                                  const Property& candidate) {
  if (!query.program.find_marker(candidate.location)) throw UnknownMarker(candidate.location);
  std::string v1 = annotate(query.program, query.preconditions, candidate);
  std::vector<Property> assumes = query.preconditions;
  assumes.push_back(candidate);
  std::string v2 = annotate(query.program, assumes, query.postcondition);
  return {std::move(v1), std::move(v2)};
}

std::string baseline_source(const VerificationQuery& query) {
  return annotate(query.program, query.preconditions, query.postcondition);
}

SplitResult run_split(const OracleBackend& backend, const VerificationQuery& query,
                      const Property& candidate, double timeout) {
  auto [src1, src2] = split_sources(query, candidate);
  spdlog::debug("[{}] correctness query:\n{}", candidate.location, src1);
  spdlog::debug("[{}] sufficiency query:\n{}", candidate.location, src2);
  auto f1 = std::async(std::launch::async,
                       [&backend, &src1, timeout] { return run_query(backend, src1, timeout); });
  auto f2 = std::async(std::launch::async,
                       [&backend, &src2, timeout] { return run_query(backend, src2, timeout); });
  SplitResult r;
  r.v1 = f1.get();
  r.v2 = f2.get();
  r.t_v = std::max(r.v1.wall_time, r.v2.wall_time);
  return r;
}

Outcome decide(Outcome v1, Outcome v2) {
  if (v2 == Outcome::False) return Outcome::False;
  if (v1 == Outcome::True && v2 == Outcome::True) return Outcome::True;
  return Outcome::Unknown;
}

double lower_median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

BaselineResult baseline_median(const OracleBackend& backend, const VerificationQuery& query,
                               int k, double timeout) {
  BaselineResult result;
  const std::string source = baseline_source(query);
  std::vector<double> times;
  bool all_timed_out = k > 0;
  for (int i = 0; i < k; ++i) {
    Verdict v = run_query(backend, source, timeout);
    times.push_back(v.wall_time);
    all_timed_out = all_timed_out && v.timed_out;
    result.runs.push_back(std::move(v));
  }
  result.all_timed_out = all_timed_out;
  if (all_timed_out) {
    result.t_b = timeout;
    result.outcome = Outcome::Unknown;
    return result;
  }
  result.t_b = lower_median(times);
  for (const auto& run : result.runs) {
    if (run.wall_time == result.t_b) {
      result.outcome = run.outcome;
      break;
    }
  }
  return result;
}

}  // namespace invkit
