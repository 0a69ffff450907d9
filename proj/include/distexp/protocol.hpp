#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "distexp/core.hpp"

namespace distexp {

enum class ModelKind {
  /// The queried site chooses the expert and observes the payoff.
  SitePrediction,
  /// The coordinator chooses; the queried site observes the payoff.
  CoordinatorPrediction,
};

std::string to_string(ModelKind model);

/// Star network between one coordinator and k sites. Sites have no direct
/// link to each other; a broadcast costs k messages. Delay is zero: anything
/// sent during step t is visible before the query of step t + 1.
class Channel {
 public:
  virtual ~Channel() = default;

  virtual int sites() const = 0;
  virtual void to_coordinator(int site, int reals) = 0;
  virtual void to_site(int site, int reals) = 0;
  virtual void broadcast(int reals) = 0;
};

/// Read-only view of which steps carried communication. The only thing an
/// adaptive adversary is allowed to see of the algorithm.
class CommObservation {
 public:
  virtual ~CommObservation() = default;
  /// True iff at least one message was sent during a step in [from, to]
  /// (1-based, inclusive). Empty ranges return false.
  virtual bool any_message_in(std::int64_t from, std::int64_t to) const = 0;
};

/// Channel used by the simulator: charges a CommLedger and remembers which
/// steps communicated.
class StarChannel final : public Channel, public CommObservation {
 public:
  StarChannel(int k, int n, std::int64_t horizon);

  /// Opens step t (1-based); messages sent from now on are charged to it.
  void begin_step(std::int64_t t);

  int sites() const override { return k_; }
  void to_coordinator(int site, int reals) override;
  void to_site(int site, int reals) override;
  void broadcast(int reals) override;

  bool any_message_in(std::int64_t from, std::int64_t to) const override;

  const CommLedger& ledger() const { return ledger_; }
  std::int64_t messages_this_step() const { return step_messages_; }

 private:
  void charge(std::int64_t messages, int reals);
  void check_site(int site) const;

  int k_;
  CommLedger ledger_;
  std::int64_t step_ = 0;
  std::int64_t step_messages_ = 0;
  std::vector<bool> active_;  // active_[t - 1]: step t carried a message
};

/// A distributed forecasting protocol driven one step at a time.
///
/// Per step the simulator calls choose() for the queried site, then
/// observe() at that same site once the payoff is revealed. All
/// communication goes through the channel argument.
class Algorithm {
 public:
  virtual ~Algorithm() = default;

  virtual std::string name() const = 0;
  virtual ModelKind model() const = 0;

  virtual ExpertIndex choose(int site, Channel& channel) = 0;
  virtual void observe(int site, const PayoffVector& p, Channel& channel) = 0;
};

}  // namespace distexp
