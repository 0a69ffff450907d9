#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "distexp/adversaries.hpp"
#include "distexp/baselines.hpp"
#include "distexp/core.hpp"
#include "distexp/dfpl.hpp"
#include "distexp/protocol.hpp"

namespace distexp {

enum class AlgorithmKind { FullComm, NoComm, MiniBatch, Counter, Dfpl, Lef };

std::string to_string(AlgorithmKind kind);
AlgorithmKind parse_algorithm_kind(const std::string& name);
ModelKind default_model(AlgorithmKind kind);

/// Algorithm plus its knobs. Zero-valued knobs take run-dependent defaults:
/// beta = k, budget = max(1, T / 10), eta = sqrt(T) for the FPL baselines,
/// ell derived from epsilon for DFPL.
struct AlgorithmSpec {
  AlgorithmKind kind = AlgorithmKind::Dfpl;
  double epsilon = 0.1;
  std::int64_t ell = 0;
  double eta = 0.0;
  double p_sync = 0.05;
  double beta = 0.0;
  std::int64_t budget = 0;
  LefForecaster lef_forecaster = LefForecaster::Ewf;

  /// Knobs that matter for this kind, "name=value;..." in fixed order.
  std::string params_string() const;
  /// Copy with beta and budget resolved for a run of T steps over k sites.
  AlgorithmSpec with_defaults(std::int64_t T, int k) const;
};

struct JitterConfig {
  bool enabled = false;
  double relative_slack = 0.01;
};

struct RunOptions {
  ModelKind model = ModelKind::SitePrediction;
  std::int64_t T = 20000;
  int k = 20;
  int n = 2;
  std::uint64_t seed = 1;
  /// Adversary seed; defaults to seed.
  std::optional<std::uint64_t> adversary_seed;
  JitterConfig jitter;
  bool record_trace = false;
};

struct StepRecord {
  std::int64_t t = 0;
  int site = 0;
  ExpertIndex action{};
  PayoffVector payoff;
  std::int64_t messages = 0;
};

struct RunTrace {
  std::vector<StepRecord> steps;  ///< empty unless RunOptions::record_trace
  RunResult result;
  std::int64_t horizon = 0;       ///< steps actually simulated
  std::vector<std::string> warnings;
};

/// Effective horizon of a run: DFPL may truncate T to a multiple of ell.
std::int64_t effective_horizon(const AlgorithmSpec& algorithm, const RunOptions& options);

/// Builds the algorithm for a run. Parameter warnings are appended to warnings.
std::unique_ptr<Algorithm> make_algorithm(const AlgorithmSpec& spec, const RunOptions& options,
                                          std::vector<std::string>* warnings = nullptr);

/// Drives one run for options.T steps over an already constructed algorithm
/// and adversary. Steps: the adversary yields (site, payoff) seeing only the
/// communication of earlier steps (adaptive) or nothing (oblivious); the
/// algorithm chooses, then observes the payoff at that site.
RunTrace run_once(Algorithm& algorithm, Adversary& adversary, const RunOptions& options,
                  Channel* channel_override = nullptr);

RunTrace run_once(const AlgorithmSpec& algorithm, const AdversarySpec& adversary,
                  const RunOptions& options);

/// Recomputes regret from a recorded trace through compute_regret.
RegretSummary replay_regret(const RunTrace& trace);

struct ExperimentConfig {
  std::optional<AlgorithmSpec> algorithm;
  std::optional<AdversarySpec> adversary;
  std::optional<ModelKind> model;  ///< defaults to the algorithm's model
  std::int64_t T = 20000;
  int k = 20;
  int n = 2;
  std::uint64_t seed_base = 1;
  int seeds = 100;
  JitterConfig jitter;
  int threads = 1;
  std::string output_path;

  std::vector<std::uint64_t> seed_list() const;
  /// Throws ConfigurationError naming the offending field.
  void validate() const;
  RunOptions run_options(std::uint64_t seed) const;
};

struct SeedRow {
  std::uint64_t seed = 0;
  RunResult result;
};

struct BatchResult {
  double mean_regret = 0.0;
  double std_regret = 0.0;
  double mean_messages = 0.0;
  double std_messages = 0.0;
  double mean_payoff = 0.0;
  std::int64_t horizon = 0;
  std::vector<SeedRow> rows;  ///< ordered by seed
  std::vector<std::string> warnings;
};

/// Error raised when one seed of a batch fails.
struct BatchFailure : std::runtime_error {
  BatchFailure(std::uint64_t failed_seed, const std::string& what)
      : std::runtime_error("seed " + std::to_string(failed_seed) + ": " + what), seed(failed_seed) {}
  std::uint64_t seed;
};

BatchResult run_batch(const ExperimentConfig& config);

/// Mean and sample standard deviation of a batch's rows.
BatchResult aggregate(std::vector<SeedRow> rows);

struct SweepPoint {
  AdversarySpec adversary;
  BatchResult batch;
};

struct SweepResult {
  AlgorithmSpec algorithm;
  double worst_regret = 0.0;
  double worst_messages = 0.0;
  std::vector<SweepPoint> points;
};

/// For each algorithm, the maximum over the grid of mean regret and of mean
/// messages. base supplies T, k, n, seeds, threads and jitter.
std::vector<SweepResult> worst_case_sweep(const std::vector<AlgorithmSpec>& algorithms,
                                          const std::vector<AdversarySpec>& grid,
                                          const ExperimentConfig& base);

}  // namespace distexp
