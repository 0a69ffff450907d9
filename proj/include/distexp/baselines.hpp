#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "distexp/adversaries.hpp"
#include "distexp/core.hpp"
#include "distexp/forecasters.hpp"
#include "distexp/protocol.hpp"

namespace distexp {

/// Every step the querying site fetches the cumulative vector (1 message),
/// plays FPL(eta) and returns the payoff (1 message): non-distributed FPL
/// at 2T messages. All noise comes from one stream, RngStream(seed, site(0)).
class FullCommAlgorithm final : public Algorithm {
 public:
  FullCommAlgorithm(int n, double eta, std::uint64_t seed);

  std::string name() const override { return "full"; }
  ModelKind model() const override { return ModelKind::SitePrediction; }
  ExpertIndex choose(int site, Channel& channel) override;
  void observe(int site, const PayoffVector& p, Channel& channel) override;

 private:
  Fpl fpl_;
};

/// k isolated FPL(eta) copies, one per site, zero messages.
class NoCommAlgorithm final : public Algorithm {
 public:
  NoCommAlgorithm(int k, int n, double eta, std::uint64_t seed);

  std::string name() const override { return "none"; }
  ModelKind model() const override { return ModelKind::SitePrediction; }
  ExpertIndex choose(int site, Channel& channel) override;
  void observe(int site, const PayoffVector& p, Channel& channel) override;

 private:
  std::vector<Fpl> sites_;
};

/// At the start of each step, with probability p_sync, the coordinator
/// collects every site's unsynced payoffs (k messages) and broadcasts the sum
/// (k messages). A site plays FPL(eta) on last synced total + its own unsynced
/// payoffs.
class MiniBatchAlgorithm final : public Algorithm {
 public:
  MiniBatchAlgorithm(int k, int n, double eta, double p_sync, std::uint64_t seed);

  std::string name() const override { return "minibatch"; }
  ModelKind model() const override { return ModelKind::SitePrediction; }
  ExpertIndex choose(int site, Channel& channel) override;
  void observe(int site, const PayoffVector& p, Channel& channel) override;

  std::int64_t syncs() const { return syncs_; }

 private:
  double eta_;
  double p_sync_;
  RngStream sync_rng_;
  std::vector<RngStream> site_rng_;
  Vector synced_;
  std::vector<Vector> local_;
  std::int64_t syncs_ = 0;
};

/// Deterministic threshold counter: each site buffers its payoffs per expert
/// and flushes an expert's buffer once it reaches flush_threshold = beta / k.
/// Committed totals therefore never trail the true totals by beta or more.
class ApproxCounterState {
 public:
  ApproxCounterState(int k, int n, double flush_threshold);

  /// Adds p at site; returns the (0-based) experts flushed to the coordinator.
  std::vector<int> absorb(int site, const PayoffVector& p);

  const Vector& committed() const { return committed_; }
  const Vector& true_totals() const { return truth_; }
  const Vector& pending(int site) const { return pending_[static_cast<std::size_t>(site)]; }
  double flush_threshold() const { return threshold_; }
  /// max over experts of |true - committed|.
  double max_error() const;

  /// Throws std::logic_error if a pending buffer reached the threshold or the
  /// global error exceeded k * flush_threshold.
  void check_invariants() const;

 private:
  double threshold_;
  Vector committed_;
  Vector truth_;
  std::vector<Vector> pending_;
};

/// Sites play FPL(eta) on the committed totals of an ApproxCounterState.
/// A flush costs 1 message to the coordinator plus a k-message broadcast.
class CounterForecasterAlgorithm final : public Algorithm {
 public:
  CounterForecasterAlgorithm(int k, int n, double eta, double beta, std::uint64_t seed);

  std::string name() const override { return "counter"; }
  ModelKind model() const override { return ModelKind::SitePrediction; }
  ExpertIndex choose(int site, Channel& channel) override;
  void observe(int site, const PayoffVector& p, Channel& channel) override;

  const ApproxCounterState& counter() const { return counter_; }

 private:
  double eta_;
  ApproxCounterState counter_;
  std::vector<RngStream> site_rng_;
};

enum class LefForecaster { Ewf, Fpl };

struct LefConfig {
  std::int64_t budget = 1;  ///< C, expected number of forwarded payoffs
  double sample_probability = 1.0;  ///< C / T
  LefForecaster forecaster = LefForecaster::Ewf;

  static LefConfig for_budget(std::int64_t budget, std::int64_t T,
                              LefForecaster forecaster = LefForecaster::Ewf);
};

/// Label-efficient forecaster, coordinator-prediction model. The coordinator
/// chooses from its forecaster; the observing site forwards the payoff with
/// probability C / T (1 message), weighted by T / C on arrival. The
/// exponential forecaster's exponent per forwarded payoff is
/// sqrt(8 ln n / C) * p[a].
class LefAlgorithm final : public Algorithm {
 public:
  LefAlgorithm(int k, int n, std::int64_t T, const LefConfig& config, std::uint64_t seed);

  std::string name() const override { return "lef"; }
  ModelKind model() const override { return ModelKind::CoordinatorPrediction; }
  ExpertIndex choose(int site, Channel& channel) override;
  void observe(int site, const PayoffVector& p, Channel& channel) override;

  const Ewf& ewf() const { return ewf_; }
  static double learning_rate(int n, const LefConfig& config);

 private:
  LefConfig config_;
  Ewf ewf_;
  Vector weighted_;  // importance-weighted cumulative, FPL variant
  double fpl_eta_;
  RngStream coordinator_rng_;
  std::vector<RngStream> site_rng_;
};

/// Noise shared by the FPL-based baselines: sqrt(T).
double baseline_noise(std::int64_t T);

// -- One-call runs over an adversary ----------------------------------------

RunResult full_comm_run(std::int64_t T, int k, int n, const AdversarySpec& adversary,
                        std::uint64_t seed);
RunResult no_comm_run(std::int64_t T, int k, int n, const AdversarySpec& adversary,
                      std::uint64_t seed);
RunResult minibatch_run(std::int64_t T, int k, int n, double p_sync,
                        const AdversarySpec& adversary, std::uint64_t seed);
RunResult counter_forecaster_run(std::int64_t T, int k, int n, double beta,
                                 const AdversarySpec& adversary, std::uint64_t seed);
RunResult lef_run(std::int64_t T, int k, int n, const LefConfig& config,
                  const AdversarySpec& adversary, std::uint64_t seed);

/// Counter-accuracy stress test on the counter_permutation sequence: a site
/// may only refresh its estimate (to the exact count) when it is queried, so
/// between its consecutive queries it hears nothing. Returns the fraction of
/// queries, after each site's first, at which the site's estimate is more
/// than beta away from the true count including the current increment.
double stale_counter_violation_rate(int k, std::int64_t T, double beta, std::uint64_t seed);

}  // namespace distexp
