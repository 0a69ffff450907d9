#include "distexp/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "distexp/simulator.hpp"

namespace distexp {

namespace {

std::vector<RngStream> site_streams(int k, std::uint64_t seed) {
  std::vector<RngStream> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int s = 0; s < k; ++s) out.emplace_back(seed, streams::site(s));
  return out;
}

void require_pair(int n, const char* who) {
  if (n != 2) {
    throw UnsupportedArity(std::string(who) + " plays FPL, which is defined for 2 experts");
  }
}

}  // namespace

double baseline_noise(std::int64_t T) { return std::sqrt(static_cast<double>(T)); }

// -- Full / no communication ------------------------------------------------

FullCommAlgorithm::FullCommAlgorithm(int n, double eta, std::uint64_t seed)
    : fpl_(n, eta, RngStream(seed, streams::site(0))) {
  require_pair(n, "full");
}

ExpertIndex FullCommAlgorithm::choose(int site, Channel& channel) {
  channel.to_site(site, fpl_.experts());
  return fpl_.choose();
}

void FullCommAlgorithm::observe(int site, const PayoffVector& p, Channel& channel) {
  channel.to_coordinator(site, p.size());
  fpl_.update(p);
}

NoCommAlgorithm::NoCommAlgorithm(int k, int n, double eta, std::uint64_t seed) {
  require_pair(n, "none");
  sites_.reserve(static_cast<std::size_t>(k));
  for (int s = 0; s < k; ++s) sites_.emplace_back(n, eta, RngStream(seed, streams::site(s)));
}

ExpertIndex NoCommAlgorithm::choose(int site, Channel&) {
  return sites_.at(static_cast<std::size_t>(site)).choose();
}

void NoCommAlgorithm::observe(int site, const PayoffVector& p, Channel&) {
  sites_.at(static_cast<std::size_t>(site)).update(p);
}

// -- Mini-batch --------------------------------------------------------------

MiniBatchAlgorithm::MiniBatchAlgorithm(int k, int n, double eta, double p_sync,
                                       std::uint64_t seed)
    : eta_(eta),
      p_sync_(p_sync),
      sync_rng_(seed, streams::kCoordinator),
      site_rng_(site_streams(k, seed)),
      synced_(Vector::Zero(n)),
      local_(static_cast<std::size_t>(k), Vector::Zero(n)) {
  require_pair(n, "minibatch");
  if (!(p_sync >= 0.0 && p_sync <= 1.0)) throw InvalidArgument("minibatch: p_sync must lie in [0, 1]");
  if (!(eta > 0.0)) throw InvalidArgument("minibatch: eta must be > 0");
}

ExpertIndex MiniBatchAlgorithm::choose(int site, Channel& channel) {
  if (sync_rng_.bernoulli(p_sync_)) {
    const int n = static_cast<int>(synced_.size());
    for (int s = 0; s < channel.sites(); ++s) {
      channel.to_coordinator(s, n);
      synced_ += local_[static_cast<std::size_t>(s)];
      local_[static_cast<std::size_t>(s)].setZero();
    }
    channel.broadcast(n);
    ++syncs_;
  }
  const auto i = static_cast<std::size_t>(site);
  const Vector view = synced_ + local_.at(i);
  return perturbed_leader(view, eta_, site_rng_[i]);
}

void MiniBatchAlgorithm::observe(int site, const PayoffVector& p, Channel&) {
  local_.at(static_cast<std::size_t>(site)) += p.values();
}

// -- Threshold counter -------------------------------------------------------

ApproxCounterState::ApproxCounterState(int k, int n, double flush_threshold)
    : threshold_(flush_threshold),
      committed_(Vector::Zero(n)),
      truth_(Vector::Zero(n)),
      pending_(static_cast<std::size_t>(k), Vector::Zero(n)) {
  if (!(flush_threshold > 0.0)) throw InvalidArgument("counter: flush threshold must be > 0");
}

std::vector<int> ApproxCounterState::absorb(int site, const PayoffVector& p) {
  Vector& buf = pending_.at(static_cast<std::size_t>(site));
  if (p.size() != buf.size()) throw InvalidArgument("counter: payoff dimension mismatch");
  buf += p.values();
  truth_ += p.values();
  std::vector<int> flushed;
  for (Eigen::Index a = 0; a < buf.size(); ++a) {
    if (buf[a] >= threshold_) {
      committed_[a] += buf[a];
      buf[a] = 0.0;
      flushed.push_back(static_cast<int>(a));
    }
  }
  return flushed;
}

double ApproxCounterState::max_error() const {
  return (truth_ - committed_).cwiseAbs().maxCoeff();
}

void ApproxCounterState::check_invariants() const {
  for (const auto& buf : pending_) {
    if (buf.maxCoeff() >= threshold_) {
      throw std::logic_error("counter: a pending buffer reached the flush threshold");
    }
  }
  const double bound = static_cast<double>(pending_.size()) * threshold_;
  if (max_error() > bound * (1.0 + 1e-12)) {
    throw std::logic_error("counter: committed totals drifted beyond k * threshold");
  }
}

CounterForecasterAlgorithm::CounterForecasterAlgorithm(int k, int n, double eta, double beta,
                                                       std::uint64_t seed)
    : eta_(eta),
      counter_(k, n, beta > 0.0 ? beta / k : 1.0),
      site_rng_(site_streams(k, seed)) {
  require_pair(n, "counter");
  if (!(beta > 0.0)) throw InvalidArgument("counter: beta must be > 0");
}

ExpertIndex CounterForecasterAlgorithm::choose(int site, Channel&) {
  return perturbed_leader(counter_.committed(), eta_,
                          site_rng_.at(static_cast<std::size_t>(site)));
}

void CounterForecasterAlgorithm::observe(int site, const PayoffVector& p, Channel& channel) {
  const auto flushed = counter_.absorb(site, p);
  if (!flushed.empty()) {
    channel.to_coordinator(site, static_cast<int>(flushed.size()));
    channel.broadcast(p.size());
  }
  counter_.check_invariants();
}

// -- Label-efficient forecaster ----------------------------------------------

LefConfig LefConfig::for_budget(std::int64_t budget, std::int64_t T, LefForecaster forecaster) {
  if (budget < 1) throw InvalidArgument("lef: budget must be >= 1");
  if (budget > T) throw InvalidArgument("lef: budget exceeds the horizon");
  LefConfig c;
  c.budget = budget;
  c.sample_probability = static_cast<double>(budget) / static_cast<double>(T);
  c.forecaster = forecaster;
  return c;
}

double LefAlgorithm::learning_rate(int n, const LefConfig& config) {
  return config.sample_probability *
         Ewf::default_learning_rate(n, static_cast<double>(config.budget));
}

LefAlgorithm::LefAlgorithm(int k, int n, std::int64_t T, const LefConfig& config,
                           std::uint64_t seed)
    : config_(config),
      ewf_(n, learning_rate(n, config)),
      weighted_(Vector::Zero(n)),
      fpl_eta_(static_cast<double>(T) / std::sqrt(static_cast<double>(config.budget))),
      coordinator_rng_(seed, streams::kCoordinator),
      site_rng_(site_streams(k, seed)) {
  if (!(config.sample_probability > 0.0 && config.sample_probability <= 1.0)) {
    throw InvalidArgument("lef: sample probability must lie in (0, 1]");
  }
  if (config.forecaster == LefForecaster::Fpl) require_pair(n, "lef/fpl");
}

ExpertIndex LefAlgorithm::choose(int, Channel&) {
  if (config_.forecaster == LefForecaster::Fpl) {
    return perturbed_leader(weighted_, fpl_eta_, coordinator_rng_);
  }
  return ewf_.choose(coordinator_rng_);
}

void LefAlgorithm::observe(int site, const PayoffVector& p, Channel& channel) {
  if (!site_rng_.at(static_cast<std::size_t>(site)).bernoulli(config_.sample_probability)) return;
  channel.to_coordinator(site, p.size());
  const double iw = 1.0 / config_.sample_probability;
  if (config_.forecaster == LefForecaster::Fpl) {
    weighted_ += iw * p.values();
  } else {
    ewf_.update(p, iw);
  }
}

// -- One-call runs -----------------------------------------------------------

namespace {

RunResult run_with(const AlgorithmSpec& algorithm, std::int64_t T, int k, int n,
                   const AdversarySpec& adversary, std::uint64_t seed) {
  RunOptions options;
  options.model = default_model(algorithm.kind);
  options.T = T;
  options.k = k;
  options.n = n;
  options.seed = seed;
  return run_once(algorithm, adversary, options).result;
}

}  // namespace

RunResult full_comm_run(std::int64_t T, int k, int n, const AdversarySpec& adversary,
                        std::uint64_t seed) {
  return run_with(AlgorithmSpec{AlgorithmKind::FullComm}, T, k, n, adversary, seed);
}

RunResult no_comm_run(std::int64_t T, int k, int n, const AdversarySpec& adversary,
                      std::uint64_t seed) {
  return run_with(AlgorithmSpec{AlgorithmKind::NoComm}, T, k, n, adversary, seed);
}

RunResult minibatch_run(std::int64_t T, int k, int n, double p_sync,
                        const AdversarySpec& adversary, std::uint64_t seed) {
  AlgorithmSpec spec{AlgorithmKind::MiniBatch};
  spec.p_sync = p_sync;
  return run_with(spec, T, k, n, adversary, seed);
}

RunResult counter_forecaster_run(std::int64_t T, int k, int n, double beta,
                                 const AdversarySpec& adversary, std::uint64_t seed) {
  if (!(beta > 0.0)) throw InvalidArgument("counter: beta must be > 0");
  AlgorithmSpec spec{AlgorithmKind::Counter};
  spec.beta = beta;
  return run_with(spec, T, k, n, adversary, seed);
}

RunResult lef_run(std::int64_t T, int k, int n, const LefConfig& config,
                  const AdversarySpec& adversary, std::uint64_t seed) {
  AlgorithmSpec spec{AlgorithmKind::Lef};
  spec.budget = config.budget;
  spec.lef_forecaster = config.forecaster;
  return run_with(spec, T, k, n, adversary, seed);
}

double stale_counter_violation_rate(int k, std::int64_t T, double beta, std::uint64_t seed) {
  auto adversary = make_adversary(counter_permutation_spec(), T, k, 2, seed);
  std::vector<double> estimate(static_cast<std::size_t>(k), 0.0);
  std::vector<bool> seen(static_cast<std::size_t>(k), false);
  double count = 0.0;
  std::int64_t checked = 0;
  std::int64_t violations = 0;
  for (std::int64_t t = 1; t <= T; ++t) {
    const Query q = adversary->next(t, nullptr);
    count += q.payoff[0];
    const auto s = static_cast<std::size_t>(q.site);
    if (seen[s]) {
      ++checked;
      if (std::abs(count - estimate[s]) > beta) ++violations;
    }
    // The querying site may synchronize now; it then hears nothing until its next query.
    estimate[s] = count;
    seen[s] = true;
  }
  return checked == 0 ? 0.0 : static_cast<double>(violations) / static_cast<double>(checked);
}

}  // namespace distexp
