#include "distexp/core.hpp"

#include <charconv>
#include <cmath>
#include <string>

namespace distexp {

ExpertIndex ExpertIndex::checked(int one_based, int n) {
  if (one_based < 1 || one_based > n) {
    throw InvalidArgument("expert index " + std::to_string(one_based) + " outside [1, " +
                          std::to_string(n) + "]");
  }
  return ExpertIndex(one_based);
}

PayoffVector::PayoffVector(Vector values) : values_(std::move(values)) {
  if (values_.size() < 2) throw InvalidArgument("payoff vector needs at least 2 experts");
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidArgument("payoff entry " + std::to_string(i + 1) + " = " + std::to_string(v) +
                            " outside [0, 1]");
    }
  }
}

PayoffVector::PayoffVector(std::initializer_list<double> values)
    : PayoffVector(Vector(Eigen::Map<const Vector>(values.begin(),
                                                   static_cast<Eigen::Index>(values.size())))) {}

PayoffVector PayoffVector::zeros(int n) { return PayoffVector(Vector::Zero(n)); }

double PayoffVector::at(ExpertIndex a) const {
  return values_[ExpertIndex::checked(a.value(), size()).zero_based()];
}

void CumulativePayoff::add(const PayoffVector& p) {
  if (p.size() != size()) {
    throw InvalidArgument("payoff dimension " + std::to_string(p.size()) +
                          " does not match cumulative dimension " + std::to_string(size()));
  }
  totals_ += p.values();
  ++updates_;
}

void CumulativePayoff::add(const CumulativePayoff& other) {
  if (other.size() != size()) throw InvalidArgument("cumulative dimension mismatch");
  totals_ += other.totals_;
  updates_ += other.updates_;
}

void CommLedger::record(std::int64_t messages, int reals_per_message) {
  if (messages < 0) throw InvalidArgument("negative message count");
  if (reals_per_message < 0 || reals_per_message > n_) {
    throw InvalidArgument("a message carries at most n = " + std::to_string(n_) + " reals");
  }
  messages_ += messages;
  reals_sent_ += messages * reals_per_message;
}

void RegretAccumulator::add(const PayoffVector& p, ExpertIndex action) {
  if (p.size() != columns_.size()) throw InvalidArgument("payoff dimension mismatch");
  for (Eigen::Index i = 0; i < columns_.size(); ++i) columns_[i] += p[static_cast<int>(i)];
  algorithm_payoff_ += p.at(action);
  ++steps_;
}

RegretSummary RegretAccumulator::summary() const {
  RegretSummary s;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < columns_.size(); ++i) {
    if (columns_[i] > columns_[best]) best = i;
  }
  s.best_expert = ExpertIndex(static_cast<int>(best) + 1);
  s.best_expert_payoff = columns_[best];
  s.algorithm_payoff = algorithm_payoff_;
  s.regret = s.best_expert_payoff - s.algorithm_payoff;
  return s;
}

ExpertIndex argmax_selector(double v1, double v2) {
  if (!std::isfinite(v1) || !std::isfinite(v2)) {
    throw InvalidArgument("argmax_selector: non-finite input");
  }
  return ExpertIndex(v1 > v2 ? 1 : 2);
}

ExpertIndex argmax_selector(const Vector& v) {
  if (v.size() != 2) throw InvalidArgument("argmax_selector: expects exactly 2 entries");
  return argmax_selector(v[0], v[1]);
}

RegretSummary compute_regret(std::span<const PayoffVector> payoffs,
                             std::span<const ExpertIndex> actions) {
  if (payoffs.size() != actions.size()) {
    throw InvalidArgument("compute_regret: " + std::to_string(payoffs.size()) + " payoffs vs " +
                          std::to_string(actions.size()) + " actions");
  }
  if (payoffs.empty()) throw InvalidArgument("compute_regret: empty sequence");
  RegretAccumulator acc(payoffs.front().size());
  for (std::size_t t = 0; t < payoffs.size(); ++t) acc.add(payoffs[t], actions[t]);
  return acc.summary();
}

Vector uniform_noise(double eta, int dim, RngStream& rng) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw InvalidArgument("uniform_noise: eta must be >= 0");
  if (dim < 1) throw InvalidArgument("uniform_noise: dim must be >= 1");
  Vector r(dim);
  if (eta == 0.0) {
    r.setZero();
    return r;
  }
  for (int i = 0; i < dim; ++i) r[i] = eta * rng.uniform01();
  return r;
}

std::string format_real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace distexp
