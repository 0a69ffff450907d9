#include <limits>

#include "doctest.h"
#include "distexp/core.hpp"
#include "support.hpp"

using namespace distexp;

TEST_SUITE("core") {

TEST_CASE("argmax selector prefers expert 1 only on a strict lead") {
  CHECK(argmax_selector(3.0, 1.0) == ExpertIndex(1));
  CHECK(argmax_selector(0.0, 0.0) == ExpertIndex(2));
  CHECK(argmax_selector(1.0, 1.5) == ExpertIndex(2));
  Vector v(2);
  v << 2.0, 1.0;
  CHECK(argmax_selector(v) == ExpertIndex(1));
}

TEST_CASE("argmax selector rejects non-finite input and wrong length") {
  const double inf = std::numeric_limits<double>::infinity();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(argmax_selector(inf, 0.0), InvalidArgument);
  CHECK_THROWS_AS(argmax_selector(0.0, nan), InvalidArgument);
  CHECK_THROWS_AS(argmax_selector(Vector::Zero(3)), InvalidArgument);
}

TEST_CASE("expert index bounds") {
  CHECK(ExpertIndex::checked(1, 2).zero_based() == 0);
  CHECK(ExpertIndex::checked(3, 3).value() == 3);
  CHECK_THROWS_AS(ExpertIndex::checked(0, 2), InvalidArgument);
  CHECK_THROWS_AS(ExpertIndex::checked(3, 2), InvalidArgument);
}

TEST_CASE("payoff vector validation") {
  CHECK_NOTHROW(PayoffVector{0.0, 1.0});
  CHECK_THROWS_AS(PayoffVector{0.5}, InvalidArgument);
  CHECK_THROWS_AS((PayoffVector{0.5, 1.5}), InvalidArgument);
  CHECK_THROWS_AS((PayoffVector{-0.1, 0.5}), InvalidArgument);
  CHECK_THROWS_AS((PayoffVector{std::numeric_limits<double>::quiet_NaN(), 0.5}), InvalidArgument);
  const PayoffVector p{0.25, 0.75, 0.5};
  CHECK(p.at(ExpertIndex(2)) == 0.75);
  CHECK_THROWS_AS(p.at(ExpertIndex(4)), InvalidArgument);
}

TEST_CASE("cumulative payoff is monotone and bounded by the update count") {
  CumulativePayoff c(2);
  auto seq = testing::uniform_sequence(500, 3);
  Vector prev = c.totals();
  for (const auto& p : seq) {
    c.add(p);
    CHECK((c.totals().array() >= prev.array()).all());
    CHECK((c.totals().array() <= static_cast<double>(c.updates())).all());
    prev = c.totals();
  }
  CHECK_THROWS_AS(c.add(PayoffVector{0.0, 0.0, 0.0}), InvalidArgument);
}

TEST_CASE("compute_regret on small sequences") {
  const std::vector<PayoffVector> p = {{1, 0}, {0, 1}, {1, 0}};
  SUBCASE("following the switches gains on the best expert") {
    const std::vector<ExpertIndex> a = {ExpertIndex(1), ExpertIndex(2), ExpertIndex(1)};
    const auto r = compute_regret(p, a);
    CHECK(r.best_expert_payoff == 2.0);
    CHECK(r.algorithm_payoff == 3.0);
    CHECK(r.regret == -1.0);
  }
  SUBCASE("always wrong") {
    const std::vector<ExpertIndex> a = {ExpertIndex(2), ExpertIndex(1), ExpertIndex(2)};
    CHECK(compute_regret(p, a).regret == 2.0);
  }
  SUBCASE("constant best expert") {
    std::vector<PayoffVector> q(10, PayoffVector{1, 0});
    std::vector<ExpertIndex> a(10, ExpertIndex(1));
    CHECK(compute_regret(q, a).regret == 0.0);
  }
  SUBCASE("length mismatch") {
    const std::vector<ExpertIndex> a = {ExpertIndex(1)};
    CHECK_THROWS_AS(compute_regret(p, a), InvalidArgument);
  }
}

TEST_CASE("compute_regret column ties resolve to the lowest index") {
  const std::vector<PayoffVector> p = {{0, 1, 1}, {1, 0, 0}};
  const std::vector<ExpertIndex> a = {ExpertIndex(1), ExpertIndex(1)};
  const auto r = compute_regret(p, a);
  CHECK(r.best_expert == ExpertIndex(1));
  CHECK(r.regret == 0.0);
}

TEST_CASE("regret is unchanged by adding a per-step constant to every expert") {
  RngStream rng(11, 5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<PayoffVector> base, shifted;
    std::vector<ExpertIndex> actions;
    for (int t = 0; t < 200; ++t) {
      const double a = 0.5 * rng.uniform01();
      const double b = 0.5 * rng.uniform01();
      const double c = 0.5 * rng.uniform01();
      base.push_back(PayoffVector{a, b});
      shifted.push_back(PayoffVector{a + c, b + c});
      actions.push_back(ExpertIndex(1 + static_cast<int>(rng.uniform_index(2))));
    }
    CHECK(compute_regret(base, actions).regret ==
          doctest::Approx(compute_regret(shifted, actions).regret).epsilon(1e-12));
  }
}

TEST_CASE("regret accumulator matches the batch computation exactly") {
  const auto seq = testing::uniform_sequence(1000, 9);
  RngStream rng(1, 2);
  RegretAccumulator acc(2);
  std::vector<ExpertIndex> actions;
  for (const auto& p : seq) {
    actions.push_back(ExpertIndex(1 + static_cast<int>(rng.uniform_index(2))));
    acc.add(p, actions.back());
  }
  const auto a = acc.summary();
  const auto b = compute_regret(seq, actions);
  CHECK(a.regret == b.regret);
  CHECK(a.best_expert_payoff == b.best_expert_payoff);
  CHECK(a.algorithm_payoff == b.algorithm_payoff);
}

TEST_CASE("comm ledger accounting") {
  CommLedger ledger(3);
  std::int64_t prev_m = 0, prev_r = 0;
  RngStream rng(4, 4);
  for (int i = 0; i < 100; ++i) {
    ledger.record(static_cast<std::int64_t>(rng.uniform_index(5)),
                  static_cast<int>(rng.uniform_index(4)));
    CHECK(ledger.messages() >= prev_m);
    CHECK(ledger.reals_sent() >= prev_r);
    CHECK(ledger.reals_sent() <= 3 * ledger.messages());
    prev_m = ledger.messages();
    prev_r = ledger.reals_sent();
  }
  CHECK_THROWS_AS(ledger.record(1, 4), InvalidArgument);
  CHECK_THROWS_AS(ledger.record(-1, 1), InvalidArgument);
}

TEST_CASE("uniform noise") {
  RngStream rng(8, 1);
  CHECK(uniform_noise(0.0, 2, rng) == Vector::Zero(2));
  CHECK_THROWS_AS(uniform_noise(-1.0, 2, rng), InvalidArgument);

  RngStream a(42, 3), b(42, 3);
  const Vector x = uniform_noise(8.0, 2, a);
  CHECK(x == uniform_noise(8.0, 2, b));
  CHECK((x.array() >= 0.0).all());
  CHECK((x.array() <= 8.0).all());

  RngStream c(5, 6);
  Vector sum = Vector::Zero(2);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) sum += uniform_noise(1.0, 2, c);
  CHECK(sum[0] / draws == doctest::Approx(0.5).epsilon(0.02));
  CHECK(sum[1] / draws == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("rng streams are reproducible and separated by id") {
  RngStream a(1, 10), b(1, 10), c(1, 11), d(2, 10);
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 64; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs_c |= x != c.next_u64();
    differs_d |= x != d.next_u64();
  }
  CHECK(differs_c);
  CHECK(differs_d);

  RngStream e(3, 3);
  CHECK(e.substream(5).next_u64() == RngStream(3, 3).substream(5).next_u64());
  CHECK(e.substream(5).next_u64() != e.substream(6).next_u64());
}

TEST_CASE("rng streams with distinct ids are uncorrelated") {
  RngStream a(9, 1), b(9, 2);
  const int draws = 100000;
  double sxy = 0.0;
  for (int i = 0; i < draws; ++i) sxy += (a.uniform01() - 0.5) * (b.uniform01() - 0.5);
  // Correlation estimate: sd of the mean product is (1/12)/sqrt(draws).
  CHECK(std::abs(sxy / draws) / (1.0 / 12.0) < 5.0 / std::sqrt(static_cast<double>(draws)));
}

TEST_CASE("uniform_index stays in range and covers it evenly") {
  RngStream rng(6, 6);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[rng.uniform_index(7)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("format_real round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 20000.0, -1.5e-300, 812.7456}) {
    CHECK(std::stod(format_real(v)) == v);
  }
  CHECK(format_real(0.1) == "0.1");
}

}  // TEST_SUITE
