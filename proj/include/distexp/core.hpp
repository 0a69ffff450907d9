#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "distexp/rng.hpp"

namespace distexp {

using Vector = Eigen::VectorXd;

// -- Errors ------------------------------------------------------------------

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An operation defined only for a particular number of experts was called
/// with another.
struct UnsupportedArity : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// choose/observe called out of order, or a step index outside the run.
struct ProtocolViolation : std::logic_error {
  using std::logic_error::logic_error;
};

struct OverflowError : std::overflow_error {
  using std::overflow_error::overflow_error;
};

/// Inconsistent run or experiment configuration.
struct ConfigurationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// -- Domain types ------------------------------------------------------------

/// 1-based expert index.
class ExpertIndex {
 public:
  constexpr ExpertIndex() = default;
  constexpr explicit ExpertIndex(int one_based) : value_(one_based) {}

  /// Throws InvalidArgument unless 1 <= one_based <= n.
  static ExpertIndex checked(int one_based, int n);

  constexpr int value() const { return value_; }
  constexpr int zero_based() const { return value_ - 1; }

  friend constexpr bool operator==(ExpertIndex, ExpertIndex) = default;

 private:
  int value_ = 1;
};

/// Payoffs of the n >= 2 experts for one round, each in [0, 1].
class PayoffVector {
 public:
  PayoffVector() = default;
  explicit PayoffVector(Vector values);
  PayoffVector(std::initializer_list<double> values);

  static PayoffVector zeros(int n);

  int size() const { return static_cast<int>(values_.size()); }
  double at(ExpertIndex a) const;
  double operator[](int zero_based) const { return values_[zero_based]; }
  const Vector& values() const { return values_; }

  friend bool operator==(const PayoffVector& a, const PayoffVector& b) {
    return a.values_.size() == b.values_.size() && a.values_ == b.values_;
  }

 private:
  Vector values_;
};

/// Running per-expert payoff sums.
class CumulativePayoff {
 public:
  CumulativePayoff() = default;
  explicit CumulativePayoff(int n) : totals_(Vector::Zero(n)) {}

  void add(const PayoffVector& p);
  void add(const CumulativePayoff& other);

  int size() const { return static_cast<int>(totals_.size()); }
  const Vector& totals() const { return totals_; }
  double operator[](int zero_based) const { return totals_[zero_based]; }
  std::int64_t updates() const { return updates_; }

 private:
  Vector totals_;
  std::int64_t updates_ = 0;
};

/// Exact message accounting. Every message carries at most n reals.
class CommLedger {
 public:
  CommLedger() = default;
  explicit CommLedger(int n) : n_(n) {}

  void record(std::int64_t messages, int reals_per_message);

  std::int64_t messages() const { return messages_; }
  std::int64_t reals_sent() const { return reals_sent_; }
  int experts() const { return n_; }

 private:
  int n_ = 2;
  std::int64_t messages_ = 0;
  std::int64_t reals_sent_ = 0;
};

struct RegretSummary {
  double regret = 0.0;
  double best_expert_payoff = 0.0;
  double algorithm_payoff = 0.0;
  ExpertIndex best_expert{};
};

struct RunResult {
  double regret = 0.0;
  double best_expert_payoff = 0.0;
  double algorithm_payoff = 0.0;
  CommLedger ledger;
  std::uint64_t seed = 0;
};

/// Streaming form of compute_regret. Sums in order t = 1..T.
class RegretAccumulator {
 public:
  explicit RegretAccumulator(int n) : columns_(Vector::Zero(n)) {}

  void add(const PayoffVector& p, ExpertIndex action);
  RegretSummary summary() const;
  std::int64_t steps() const { return steps_; }

 private:
  Vector columns_;
  double algorithm_payoff_ = 0.0;
  std::int64_t steps_ = 0;
};

// -- Operations --------------------------------------------------------------

/// M(v): expert 1 iff v1 > v2 strictly, expert 2 otherwise (ties included).
ExpertIndex argmax_selector(double v1, double v2);
ExpertIndex argmax_selector(const Vector& v);

/// Hindsight-best column sum minus received payoff. Column ties resolve to
/// the lowest index.
RegretSummary compute_regret(std::span<const PayoffVector> payoffs,
                             std::span<const ExpertIndex> actions);

/// dim independent draws uniform on [0, eta].
Vector uniform_noise(double eta, int dim, RngStream& rng);

/// Shortest decimal string that reads back to exactly v.
std::string format_real(double v);

}  // namespace distexp
