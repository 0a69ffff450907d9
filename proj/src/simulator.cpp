#include "distexp/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace distexp {

std::string to_string(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::FullComm: return "full";
    case AlgorithmKind::NoComm: return "none";
    case AlgorithmKind::MiniBatch: return "minibatch";
    case AlgorithmKind::Counter: return "counter";
    case AlgorithmKind::Dfpl: return "dfpl";
    case AlgorithmKind::Lef: return "lef";
  }
  return "unknown";
}

AlgorithmKind parse_algorithm_kind(const std::string& name) {
  for (auto kind : {AlgorithmKind::FullComm, AlgorithmKind::NoComm, AlgorithmKind::MiniBatch,
                    AlgorithmKind::Counter, AlgorithmKind::Dfpl, AlgorithmKind::Lef}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigurationError("unknown algorithm '" + name + "'");
}

ModelKind default_model(AlgorithmKind kind) {
  return kind == AlgorithmKind::Lef ? ModelKind::CoordinatorPrediction : ModelKind::SitePrediction;
}

std::string AlgorithmSpec::params_string() const {
  std::string s;
  switch (kind) {
    case AlgorithmKind::FullComm:
    case AlgorithmKind::NoComm:
      if (eta > 0.0) s = "eta=" + format_real(eta);
      break;
    case AlgorithmKind::MiniBatch:
      s = "p_sync=" + format_real(p_sync);
      break;
    case AlgorithmKind::Counter:
      s = "beta=" + format_real(beta);
      break;
    case AlgorithmKind::Dfpl:
      s = "epsilon=" + format_real(epsilon);
      if (ell > 0) s += ";ell=" + std::to_string(ell);
      if (eta > 0.0) s += ";eta=" + format_real(eta);
      break;
    case AlgorithmKind::Lef:
      s = "budget=" + std::to_string(budget) +
          (lef_forecaster == LefForecaster::Ewf ? ";forecaster=ewf" : ";forecaster=fpl");
      break;
  }
  return s;
}

AlgorithmSpec AlgorithmSpec::with_defaults(std::int64_t T, int k) const {
  AlgorithmSpec s = *this;
  if (s.beta <= 0.0) s.beta = static_cast<double>(k);
  if (s.budget <= 0) s.budget = std::max<std::int64_t>(1, T / 10);
  return s;
}

namespace {

DfplParams dfpl_params(const AlgorithmSpec& spec, const RunOptions& options) {
  if (spec.ell > 0) {
    const std::int64_t horizon = (options.T / spec.ell) * spec.ell;
    DfplParams p = make_params(horizon, spec.ell, spec.eta);
    if (horizon != options.T) {
      p.warnings.push_back("T truncated from " + std::to_string(options.T) + " to " +
                           std::to_string(horizon));
    }
    return p;
  }
  DfplParams p = derive_params(options.T, options.k, spec.epsilon);
  if (spec.eta > 0.0) {
    auto warnings = p.warnings;
    p = make_params(p.T, p.ell, spec.eta);
    warnings.insert(warnings.end(), p.warnings.begin(), p.warnings.end());
    p.warnings = warnings;
  }
  return p;
}

double fpl_noise(const AlgorithmSpec& spec, std::int64_t T) {
  return spec.eta > 0.0 ? spec.eta : baseline_noise(T);
}

}  // namespace

std::int64_t effective_horizon(const AlgorithmSpec& algorithm, const RunOptions& options) {
  if (algorithm.kind == AlgorithmKind::Dfpl) return dfpl_params(algorithm, options).T;
  return options.T;
}

std::unique_ptr<Algorithm> make_algorithm(const AlgorithmSpec& spec, const RunOptions& options,
                                          std::vector<std::string>* warnings) {
  const int k = options.k;
  const int n = options.n;
  const std::int64_t T = options.T;
  if (k < 1) throw ConfigurationError("k must be >= 1");
  if (n < 2) throw ConfigurationError("n must be >= 2");
  if (T < 1) throw ConfigurationError("T must be >= 1");
  switch (spec.kind) {
    case AlgorithmKind::FullComm:
      return std::make_unique<FullCommAlgorithm>(n, fpl_noise(spec, T), options.seed);
    case AlgorithmKind::NoComm:
      return std::make_unique<NoCommAlgorithm>(k, n, fpl_noise(spec, T), options.seed);
    case AlgorithmKind::MiniBatch:
      return std::make_unique<MiniBatchAlgorithm>(k, n, fpl_noise(spec, T), spec.p_sync,
                                                  options.seed);
    case AlgorithmKind::Counter: {
      return std::make_unique<CounterForecasterAlgorithm>(
          k, n, fpl_noise(spec, T), spec.with_defaults(T, k).beta, options.seed);
    }
    case AlgorithmKind::Dfpl: {
      DfplParams params = dfpl_params(spec, options);
      if (warnings) warnings->insert(warnings->end(), params.warnings.begin(), params.warnings.end());
      std::vector<std::int64_t> schedule;
      if (options.jitter.enabled) {
        RngStream jitter_rng(options.seed, streams::kJitter);
        schedule = block_schedule(params, options.jitter.relative_slack, &jitter_rng);
      }
      return std::make_unique<DfplAlgorithm>(n, params,
                                             RngStream(options.seed, streams::kCoordinator),
                                             std::move(schedule));
    }
    case AlgorithmKind::Lef: {
      const std::int64_t budget = spec.with_defaults(T, k).budget;
      return std::make_unique<LefAlgorithm>(
          k, n, T, LefConfig::for_budget(budget, T, spec.lef_forecaster), options.seed);
    }
  }
  throw ConfigurationError("unsupported algorithm");
}

RunTrace run_once(Algorithm& algorithm, Adversary& adversary, const RunOptions& options,
                  Channel* channel_override) {
  if (algorithm.model() != options.model) {
    throw ConfigurationError(algorithm.name() + " runs in the " + to_string(algorithm.model()) +
                             "-prediction model, not " + to_string(options.model));
  }
  StarChannel star(options.k, options.n, options.T);
  Channel& channel = channel_override ? *channel_override : star;
  const CommObservation* view = adversary.adaptive() ? &star : nullptr;
  if (adversary.adaptive() && channel_override) {
    throw ConfigurationError("adaptive adversaries need the simulator's own channel");
  }

  RunTrace trace;
  trace.horizon = options.T;
  if (options.record_trace) trace.steps.reserve(static_cast<std::size_t>(options.T));
  RegretAccumulator regret(options.n);
  const bool coordinator_chooses = options.model == ModelKind::CoordinatorPrediction;

  for (std::int64_t t = 1; t <= options.T; ++t) {
    star.begin_step(t);
    Query q = adversary.next(t, view);
    if (q.payoff.size() != options.n) {
      throw ProtocolViolation("step " + std::to_string(t) + ": adversary produced " +
                              std::to_string(q.payoff.size()) + " payoffs for n = " +
                              std::to_string(options.n));
    }
    if (q.site < 0 || q.site >= options.k) {
      throw ProtocolViolation("step " + std::to_string(t) + ": query routed to missing site " +
                              std::to_string(q.site));
    }
    ExpertIndex action;
    try {
      action = algorithm.choose(coordinator_chooses ? -1 : q.site, channel);
      if (action.value() < 1 || action.value() > options.n) {
        throw ProtocolViolation("chose expert " + std::to_string(action.value()) + " of " +
                                std::to_string(options.n));
      }
      algorithm.observe(q.site, q.payoff, channel);
    } catch (const ProtocolViolation& e) {
      throw ProtocolViolation("step " + std::to_string(t) + ": " + e.what());
    }
    regret.add(q.payoff, action);
    if (options.record_trace) {
      trace.steps.push_back({t, q.site, action, std::move(q.payoff), star.messages_this_step()});
    }
  }

  const RegretSummary s = regret.summary();
  trace.result.regret = s.regret;
  trace.result.best_expert_payoff = s.best_expert_payoff;
  trace.result.algorithm_payoff = s.algorithm_payoff;
  trace.result.ledger = star.ledger();
  trace.result.seed = options.seed;
  return trace;
}

RunTrace run_once(const AlgorithmSpec& algorithm, const AdversarySpec& adversary,
                  const RunOptions& options) {
  RunOptions effective = options;
  effective.T = effective_horizon(algorithm, options);
  std::vector<std::string> warnings;
  auto alg = make_algorithm(algorithm, effective, &warnings);
  auto adv = make_adversary(adversary, effective.T, effective.k, effective.n,
                            options.adversary_seed.value_or(options.seed));
  RunTrace trace = run_once(*alg, *adv, effective);
  trace.warnings = std::move(warnings);
  return trace;
}

RegretSummary replay_regret(const RunTrace& trace) {
  std::vector<PayoffVector> payoffs;
  std::vector<ExpertIndex> actions;
  payoffs.reserve(trace.steps.size());
  actions.reserve(trace.steps.size());
  for (const auto& step : trace.steps) {
    payoffs.push_back(step.payoff);
    actions.push_back(step.action);
  }
  return compute_regret(payoffs, actions);
}

// -- Batches -----------------------------------------------------------------

std::vector<std::uint64_t> ExperimentConfig::seed_list() const {
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(std::max(seeds, 0)));
  for (int i = 0; i < seeds; ++i) out.push_back(seed_base + static_cast<std::uint64_t>(i));
  return out;
}

void ExperimentConfig::validate() const {
  if (!algorithm) throw ConfigurationError("missing required field 'algorithm'");
  if (!adversary) throw ConfigurationError("missing required field 'adversary'");
  if (T < 1) throw ConfigurationError("field 'T' must be >= 1");
  if (k < 1) throw ConfigurationError("field 'k' must be >= 1");
  if (n < 2) throw ConfigurationError("field 'n' must be >= 2");
  if (seeds < 1) throw ConfigurationError("field 'seeds' must be >= 1");
  if (threads < 1) throw ConfigurationError("field 'threads' must be >= 1");
  if (jitter.relative_slack < 0.0 || jitter.relative_slack >= 1.0) {
    throw ConfigurationError("field 'jitter_slack' must lie in [0, 1)");
  }
  const ModelKind m = model.value_or(default_model(algorithm->kind));
  if (m != default_model(algorithm->kind)) {
    throw ConfigurationError("field 'model': " + to_string(algorithm->kind) + " runs in the " +
                             to_string(default_model(algorithm->kind)) + "-prediction model");
  }
  switch (algorithm->kind) {
    case AlgorithmKind::Dfpl:
      if (algorithm->ell <= 0 && !(algorithm->epsilon > 0.0 && algorithm->epsilon < 0.2)) {
        throw ConfigurationError("field 'epsilon' must lie in (0, 1/5)");
      }
      break;
    case AlgorithmKind::MiniBatch:
      if (!(algorithm->p_sync >= 0.0 && algorithm->p_sync <= 1.0)) {
        throw ConfigurationError("field 'p_sync' must lie in [0, 1]");
      }
      break;
    case AlgorithmKind::Counter:
      if (algorithm->beta < 0.0) throw ConfigurationError("field 'beta' must be > 0");
      break;
    case AlgorithmKind::Lef:
      if (algorithm->budget < 0 || algorithm->budget > T) {
        throw ConfigurationError("field 'budget' must lie in [1, T]");
      }
      break;
    default:
      break;
  }
}

RunOptions ExperimentConfig::run_options(std::uint64_t seed) const {
  RunOptions o;
  o.model = model.value_or(default_model(algorithm ? algorithm->kind : AlgorithmKind::Dfpl));
  o.T = T;
  o.k = k;
  o.n = n;
  o.seed = seed;
  o.jitter = jitter;
  return o;
}

BatchResult aggregate(std::vector<SeedRow> rows) {
  BatchResult b;
  const double count = static_cast<double>(rows.size());
  if (rows.empty()) return b;
  double sr = 0.0, sm = 0.0, sp = 0.0;
  for (const auto& r : rows) {
    sr += r.result.regret;
    sm += static_cast<double>(r.result.ledger.messages());
    sp += r.result.algorithm_payoff;
  }
  b.mean_regret = sr / count;
  b.mean_messages = sm / count;
  b.mean_payoff = sp / count;
  if (rows.size() > 1) {
    double vr = 0.0, vm = 0.0;
    for (const auto& r : rows) {
      const double dr = r.result.regret - b.mean_regret;
      const double dm = static_cast<double>(r.result.ledger.messages()) - b.mean_messages;
      vr += dr * dr;
      vm += dm * dm;
    }
    b.std_regret = std::sqrt(vr / (count - 1.0));
    b.std_messages = std::sqrt(vm / (count - 1.0));
  }
  b.rows = std::move(rows);
  return b;
}

BatchResult run_batch(const ExperimentConfig& config) {
  config.validate();
  const auto seeds = config.seed_list();
  std::vector<SeedRow> rows(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::vector<std::string> warnings;
  std::int64_t horizon = config.T;
  std::mutex warnings_mutex;

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        RunTrace trace = run_once(*config.algorithm, *config.adversary, config.run_options(seeds[i]));
        rows[i] = {seeds[i], trace.result};
        if (i == 0) {
          std::lock_guard lock(warnings_mutex);
          warnings = std::move(trace.warnings);
          horizon = trace.horizon;
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::min<int>(config.threads, static_cast<int>(seeds.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw BatchFailure(seeds[i], e.what());
    }
  }
  BatchResult b = aggregate(std::move(rows));
  b.warnings = std::move(warnings);
  b.horizon = horizon;
  return b;
}

std::vector<SweepResult> worst_case_sweep(const std::vector<AlgorithmSpec>& algorithms,
                                          const std::vector<AdversarySpec>& grid,
                                          const ExperimentConfig& base) {
  if (grid.empty()) throw ConfigurationError("worst_case_sweep: empty adversary grid");
  std::vector<SweepResult> out;
  for (const auto& algorithm : algorithms) {
    SweepResult r;
    r.algorithm = algorithm;
    bool first = true;
    for (const auto& adversary : grid) {
      ExperimentConfig config = base;
      config.algorithm = algorithm;
      config.adversary = adversary;
      config.model.reset();
      BatchResult batch = run_batch(config);
      if (first || batch.mean_regret > r.worst_regret) r.worst_regret = batch.mean_regret;
      if (first || batch.mean_messages > r.worst_messages) r.worst_messages = batch.mean_messages;
      first = false;
      r.points.push_back({adversary, std::move(batch)});
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace distexp
