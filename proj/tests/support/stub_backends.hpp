#pragma once

#include <atomic>
#include <chrono>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "invkit/verify.hpp"

namespace invkit::testing {

/// Sleeps for a fixed time and answers TRUE; records peak concurrency.
class SleepBackend final : public OracleBackend {
 public:
  explicit SleepBackend(double seconds) : seconds_(seconds) {}

  OracleResult check(const std::string&, double timeout) const override {
    const int now = ++in_flight_;
    int seen = peak_.load();
    while (now > seen && !peak_.compare_exchange_weak(seen, now)) {
    }
    const double nap = std::min(seconds_, timeout);
    std::this_thread::sleep_for(std::chrono::duration<double>(nap));
    --in_flight_;
    OracleResult r;
    if (seconds_ > timeout) {
      r.timed_out = true;
    } else {
      r.outcome = Outcome::True;
    }
    return r;
  }
  std::string name() const override { return "sleep"; }
  int max_in_flight() const { return peak_.load(); }

 private:
  double seconds_;
  mutable std::atomic<int> in_flight_{0};
  mutable std::atomic<int> peak_{0};
};

class ThrowingBackend final : public OracleBackend {
 public:
  OracleResult check(const std::string&, double) const override { throw std::runtime_error("boom"); }
  std::string name() const override { return "throwing"; }
};

/// Replays a fixed list of answers in call order, cycling at the end.
class ScriptedBackend final : public OracleBackend {
 public:
  struct Answer {
    Outcome outcome;
    double seconds;
    bool timed_out = false;
  };
  explicit ScriptedBackend(std::vector<Answer> answers) : answers_(std::move(answers)) {}

  OracleResult check(const std::string&, double) const override {
    const Answer& a = answers_[next_++ % answers_.size()];
    OracleResult r;
    r.outcome = a.outcome;
    r.timed_out = a.timed_out;
    r.reported_time = a.seconds;
    return r;
  }
  std::string name() const override { return "scripted"; }

 private:
  std::vector<Answer> answers_;
  mutable std::atomic<std::size_t> next_{0};
};

}  // namespace invkit::testing

namespace invkit::testing {

/// Counts calls and answers TRUE.
class CountingBackend final : public OracleBackend {
 public:
  OracleResult check(const std::string&, double) const override {
    ++calls_;
    OracleResult r;
    r.outcome = Outcome::True;
    r.reported_time = 1.0;
    return r;
  }
  std::string name() const override { return "counting"; }
  int calls() const { return calls_.load(); }

 private:
  mutable std::atomic<int> calls_{0};
};

}  // namespace invkit::testing
