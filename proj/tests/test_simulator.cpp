#include <cmath>

#include "doctest.h"
#include "distexp/simulator.hpp"
#include "support.hpp"

using namespace distexp;

namespace {

/// Channel stub that counts what an algorithm sends.
struct CountingChannel final : Channel {
  int k;
  std::int64_t messages = 0;
  std::int64_t reals = 0;
  explicit CountingChannel(int sites) : k(sites) {}
  int sites() const override { return k; }
  void to_coordinator(int, int r) override { ++messages, reals += r; }
  void to_site(int, int r) override { ++messages, reals += r; }
  void broadcast(int r) override { messages += k, reals += static_cast<std::int64_t>(k) * r; }
};

/// Picks an out-of-range expert on a given step.
struct BrokenAlgorithm final : Algorithm {
  std::int64_t t = 0, bad_step;
  explicit BrokenAlgorithm(std::int64_t bad) : bad_step(bad) {}
  std::string name() const override { return "broken"; }
  ModelKind model() const override { return ModelKind::SitePrediction; }
  ExpertIndex choose(int, Channel&) override { return ExpertIndex(++t == bad_step ? 3 : 1); }
  void observe(int, const PayoffVector&, Channel&) override {}
};

RunOptions options_for(std::int64_t T, int k, std::uint64_t seed, bool trace = false) {
  RunOptions o;
  o.T = T;
  o.k = k;
  o.seed = seed;
  o.record_trace = trace;
  return o;
}

AlgorithmSpec dfpl_spec(double epsilon) {
  AlgorithmSpec s{AlgorithmKind::Dfpl};
  s.epsilon = epsilon;
  return s;
}

ExperimentConfig batch_config(AlgorithmSpec algorithm, AdversarySpec adversary, std::int64_t T,
                              int k, int seeds) {
  ExperimentConfig c;
  c.algorithm = algorithm;
  c.adversary = adversary;
  c.T = T;
  c.k = k;
  c.seeds = seeds;
  return c;
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("messages seen by an instrumented channel match the ledger") {
  const auto options = options_for(4000, 8, 3);
  for (auto spec : {AlgorithmSpec{AlgorithmKind::FullComm}, dfpl_spec(0.1),
                    AlgorithmSpec{AlgorithmKind::MiniBatch}, AlgorithmSpec{AlgorithmKind::Counter}}) {
    const auto reference = run_once(spec, markov_spec(20), options);
    auto alg = make_algorithm(spec, options);
    auto adv = make_adversary(markov_spec(20), options.T, options.k, options.n, options.seed);
    CountingChannel stub(options.k);
    const auto stubbed = run_once(*alg, *adv, options, &stub);
    CHECK(stub.messages == reference.result.ledger.messages());
    CHECK(stub.reals == reference.result.ledger.reals_sent());
    CHECK(stubbed.result.regret == reference.result.regret);
  }
}

TEST_CASE("runs are deterministic in the seed") {
  const auto options = options_for(5000, 10, 17);
  const auto a = run_once(dfpl_spec(0.1), zigzag_spec(50), options);
  const auto b = run_once(dfpl_spec(0.1), zigzag_spec(50), options);
  CHECK(a.result.regret == b.result.regret);
  CHECK(a.result.ledger.messages() == b.result.ledger.messages());
  const auto c = run_once(dfpl_spec(0.1), zigzag_spec(50), options_for(5000, 10, 18));
  CHECK(c.result.regret != a.result.regret);
}

TEST_CASE("trace replay reproduces regret and messages exactly") {
  for (auto spec : {dfpl_spec(0.1), AlgorithmSpec{AlgorithmKind::Counter},
                    AlgorithmSpec{AlgorithmKind::Lef}}) {
    RunOptions o = options_for(3000, 6, 5, true);
    o.model = default_model(spec.kind);
    const auto trace = run_once(spec, markov_spec(5), o);
    REQUIRE(trace.steps.size() == 3000);
    const auto replay = replay_regret(trace);
    CHECK(replay.regret == trace.result.regret);
    std::int64_t sum = 0;
    for (const auto& s : trace.steps) sum += s.messages;
    CHECK(sum == trace.result.ledger.messages());
  }
}

TEST_CASE("star channel makes step t traffic visible from step t + 1") {
  StarChannel channel(3, 2, 10);
  channel.begin_step(1);
  CHECK_FALSE(channel.any_message_in(1, 1));
  channel.broadcast(2);
  CHECK(channel.messages_this_step() == 3);
  channel.begin_step(2);
  CHECK(channel.any_message_in(1, 1));
  CHECK_FALSE(channel.any_message_in(2, 2));
  channel.to_coordinator(0, 1);
  channel.begin_step(3);
  CHECK(channel.any_message_in(1, 2));
  CHECK_FALSE(channel.any_message_in(3, 3));
  CHECK_FALSE(channel.any_message_in(2, 1));
  CHECK(channel.ledger().messages() == 4);
  CHECK(channel.ledger().reals_sent() == 7);
  CHECK_THROWS_AS(channel.to_site(3, 1), InvalidArgument);
}

TEST_CASE("model mismatches are configuration errors") {
  RunOptions o = options_for(100, 2, 1);
  o.model = ModelKind::CoordinatorPrediction;
  CHECK_THROWS_AS(run_once(dfpl_spec(0.1), markov_spec(5), o), ConfigurationError);
  auto c = batch_config(dfpl_spec(0.1), markov_spec(5), 100, 2, 1);
  c.model = ModelKind::CoordinatorPrediction;
  CHECK_THROWS_AS(c.validate(), ConfigurationError);
}

TEST_CASE("protocol violations name the step") {
  BrokenAlgorithm alg(7);
  auto adv = make_adversary(markov_spec(5), 20, 2, 2, 1);
  try {
    run_once(alg, *adv, options_for(20, 2, 1));
    FAIL("expected a violation");
  } catch (const ProtocolViolation& e) {
    CHECK(std::string(e.what()).find("step 7") != std::string::npos);
  }
  auto wrong_n = make_adversary(iid_uniform_spec(), 20, 2, 3, 1);
  try {
    run_once(alg, *wrong_n, options_for(20, 2, 1));
    FAIL("expected a violation");
  } catch (const ProtocolViolation& e) {
    CHECK(std::string(e.what()).find("step 1") != std::string::npos);
  }
}

TEST_CASE("oblivious sequences do not depend on the algorithm") {
  std::vector<std::vector<StepRecord>> traces;
  for (auto spec : {AlgorithmSpec{AlgorithmKind::FullComm}, AlgorithmSpec{AlgorithmKind::NoComm},
                    dfpl_spec(0.1)}) {
    traces.push_back(run_once(spec, markov_spec(7), options_for(2000, 5, 9, true)).steps);
  }
  for (std::size_t i = 0; i < 2000; ++i) {
    CHECK(traces[0][i].payoff == traces[1][i].payoff);
    CHECK(traces[0][i].payoff == traces[2][i].payoff);
    CHECK(traces[0][i].site == traces[2][i].site);
  }
}

TEST_CASE("adaptive adversary holds total payoff near T/2") {
  for (auto spec : {AlgorithmSpec{AlgorithmKind::NoComm}, AlgorithmSpec{AlgorithmKind::FullComm},
                    dfpl_spec(0.1)}) {
    AdversarySpec adv = adaptive_block_spec();
    adv.params["block"] = 8;
    const auto b = run_batch(batch_config(spec, adv, 2000, 8, 200));
    std::vector<double> payoffs;
    for (const auto& r : b.rows) payoffs.push_back(r.result.algorithm_payoff);
    const double se = testing::sample_std(payoffs) / std::sqrt(200.0);
    CHECK(std::abs(b.mean_payoff - 1000.0) <= 3 * se + 1e-9);
  }
}

TEST_CASE("batches") {
  SUBCASE("one seed gives one row and zero spread") {
    const auto b = run_batch(batch_config(dfpl_spec(0.1), markov_spec(20), 2000, 4, 1));
    CHECK(b.rows.size() == 1);
    CHECK(b.std_regret == 0.0);
    CHECK(b.mean_regret == b.rows[0].result.regret);
  }
  SUBCASE("split seed ranges aggregate like the whole") {
    auto whole = batch_config(dfpl_spec(0.1), markov_spec(20), 2000, 4, 100);
    auto first = whole, second = whole;
    first.seeds = 50;
    second.seed_base = 51;
    second.seeds = 50;
    const auto w = run_batch(whole);
    auto rows = run_batch(first).rows;
    for (auto& r : run_batch(second).rows) rows.push_back(r);
    const auto u = aggregate(rows);
    CHECK(u.mean_regret == doctest::Approx(w.mean_regret).epsilon(1e-12));
    CHECK(u.std_regret == doctest::Approx(w.std_regret).epsilon(1e-12));
    CHECK(u.mean_messages == w.mean_messages);
  }
  SUBCASE("thread count does not change results") {
    auto c = batch_config(dfpl_spec(0.1), zigzag_spec(50), 2000, 4, 24);
    const auto one = run_batch(c);
    c.threads = 4;
    const auto four = run_batch(c);
    REQUIRE(one.rows.size() == four.rows.size());
    for (std::size_t i = 0; i < one.rows.size(); ++i) {
      CHECK(one.rows[i].seed == four.rows[i].seed);
      CHECK(one.rows[i].result.regret == four.rows[i].result.regret);
    }
    CHECK(one.mean_regret == four.mean_regret);
  }
  SUBCASE("spread estimate agrees with a larger reference") {
    auto c = batch_config(AlgorithmSpec{AlgorithmKind::FullComm}, markov_spec(20), 2000, 4, 100);
    const auto small = run_batch(c);
    c.seed_base = 1001;
    c.seeds = 200;
    const auto ref = run_batch(c);
    CHECK(small.std_regret == doctest::Approx(ref.std_regret).epsilon(0.25));
  }
  SUBCASE("failures name the seed") {
    auto c = batch_config(AlgorithmSpec{AlgorithmKind::FullComm}, iid_uniform_spec(), 100, 2, 3);
    c.n = 3;
    try {
      run_batch(c);
      FAIL("expected a failure");
    } catch (const BatchFailure& e) {
      CHECK(e.seed == 1);
    }
  }
  SUBCASE("validation names the field") {
    ExperimentConfig c;
    c.adversary = markov_spec(5);
    try {
      c.validate();
      FAIL("expected an error");
    } catch (const ConfigurationError& e) {
      CHECK(std::string(e.what()).find("algorithm") != std::string::npos);
    }
    c.algorithm = dfpl_spec(0.3);
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("epsilon"), ConfigurationError);
  }
}

TEST_CASE("worst-case sweep") {
  ExperimentConfig base;
  base.T = 20000;
  base.k = 20;
  base.seeds = 5;
  const std::vector<AdversarySpec> grid = {zigzag_spec(10), zigzag_spec(100), markov_spec(20)};
  const auto out = worst_case_sweep({dfpl_spec(0.05), dfpl_spec(0.1), dfpl_spec(0.15)}, grid, base);
  REQUIRE(out.size() == 3);
  for (const auto& r : out) {
    CHECK(r.points.size() == 3);
    for (const auto& p : r.points) {
      CHECK(p.batch.mean_regret <= r.worst_regret);
      CHECK(p.batch.mean_messages <= r.worst_messages);
    }
  }
  CHECK(out[0].worst_messages >= out[1].worst_messages);
  CHECK(out[1].worst_messages >= out[2].worst_messages);
  CHECK(out[0].worst_messages > out[2].worst_messages);
  CHECK_THROWS_AS(worst_case_sweep({dfpl_spec(0.1)}, {}, base), ConfigurationError);
}

TEST_CASE("jittered blocks keep the message count close") {
  auto c = batch_config(dfpl_spec(0.1), markov_spec(20), 20000, 10, 30);
  const auto nominal = run_batch(c);
  c.jitter.enabled = true;
  c.jitter.relative_slack = 0.2;
  const auto jittered = run_batch(c);
  CHECK(jittered.mean_messages == doctest::Approx(nominal.mean_messages).epsilon(0.15));
}

TEST_CASE("algorithm names round-trip") {
  for (auto k : {AlgorithmKind::FullComm, AlgorithmKind::NoComm, AlgorithmKind::MiniBatch,
                 AlgorithmKind::Counter, AlgorithmKind::Dfpl, AlgorithmKind::Lef}) {
    CHECK(parse_algorithm_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_algorithm_kind("oracle"), ConfigurationError);
  CHECK(default_model(AlgorithmKind::Lef) == ModelKind::CoordinatorPrediction);
  CHECK(dfpl_spec(0.1).params_string() == "epsilon=0.1");
}

}  // TEST_SUITE
