#pragma once

#include "distexp/core.hpp"

namespace distexp {

/// Follow the perturbed leader over two experts with uniform [0, eta] noise,
/// redrawn at every choice.
class Fpl {
 public:
  Fpl(int n, double eta, RngStream rng);

  /// M(cumulative + r) with fresh r; does not touch the cumulative vector.
  /// Throws UnsupportedArity unless n == 2.
  ExpertIndex choose();
  void update(const PayoffVector& p);

  const CumulativePayoff& cumulative() const { return cumulative_; }
  double eta() const { return eta_; }
  int experts() const { return cumulative_.size(); }
  RngStream& rng() { return rng_; }

 private:
  CumulativePayoff cumulative_;
  double eta_;
  RngStream rng_;
};

/// Single FPL decision on an externally held cumulative view (length 2).
ExpertIndex perturbed_leader(const Vector& view, double eta, RngStream& rng);

/// Replaces (p1, p2) by the one-sided difference vector: the larger entry
/// becomes |p1 - p2|, the other 0. FPL's choices only see cumulative
/// differences, so its behavior is unchanged.
PayoffVector difference_transform(const PayoffVector& p);

/// Probability that FPL(eta) picks expert 1 when cumulative[1] - cumulative[2]
/// equals gap. Piecewise quadratic on [-eta, eta], the CDF of the difference
/// of two uniform [0, eta] draws.
double fpl_choice_probability(double gap, double eta);

/// Exponentially weighted forecaster. Weights are held in the log domain and
/// shifted after every update so the largest is 1.
class Ewf {
 public:
  Ewf(int n, double learning_rate);
  Ewf(Vector initial_weights, double learning_rate);

  ExpertIndex choose(RngStream& rng) const;

  /// weight[a] *= exp(learning_rate * importance_weight * p[a]).
  void update(const PayoffVector& p, double importance_weight = 1.0);

  Vector probabilities() const;
  /// Current (renormalized) weights, all strictly positive.
  Vector weights() const;
  double learning_rate() const { return learning_rate_; }
  int experts() const { return static_cast<int>(log_weights_.size()); }

  /// sqrt(8 ln n / rounds): the standard tuning over `rounds` observed rounds.
  static double default_learning_rate(int n, double rounds);

 private:
  Vector log_weights_;
  double learning_rate_;
};

}  // namespace distexp
