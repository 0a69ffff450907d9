#include "distexp/forecasters.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace distexp {

Fpl::Fpl(int n, double eta, RngStream rng) : cumulative_(n), eta_(eta), rng_(rng) {
  if (n < 2) throw InvalidArgument("Fpl: needs at least 2 experts");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidArgument("Fpl: eta must be > 0");
}

ExpertIndex Fpl::choose() { return perturbed_leader(cumulative_.totals(), eta_, rng_); }

void Fpl::update(const PayoffVector& p) { cumulative_.add(p); }

ExpertIndex perturbed_leader(const Vector& view, double eta, RngStream& rng) {
  if (view.size() != 2) {
    throw UnsupportedArity("FPL selection is defined for 2 experts, got " +
                           std::to_string(view.size()));
  }
  // Same draw order as uniform_noise(eta, 2, rng), without the allocation.
  const double r1 = eta * rng.uniform01();
  const double r2 = eta * rng.uniform01();
  return argmax_selector(view[0] + r1, view[1] + r2);
}

PayoffVector difference_transform(const PayoffVector& p) {
  if (p.size() != 2) {
    throw UnsupportedArity("difference_transform is defined for 2 experts, got " +
                           std::to_string(p.size()));
  }
  if (p[0] >= p[1]) return PayoffVector{p[0] - p[1], 0.0};
  return PayoffVector{0.0, p[1] - p[0]};
}

double fpl_choice_probability(double gap, double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw InvalidArgument("fpl_choice_probability: eta must be > 0");
  }
  if (gap > eta) return 1.0;
  if (gap < -eta) return 0.0;
  const double x = gap / eta;
  if (x >= 0.0) return 1.0 - 0.5 * (1.0 - x) * (1.0 - x);
  return 0.5 * (1.0 + x) * (1.0 + x);
}

Ewf::Ewf(int n, double learning_rate) : Ewf(Vector::Ones(n), learning_rate) {}

Ewf::Ewf(Vector initial_weights, double learning_rate)
    : log_weights_(initial_weights.size()), learning_rate_(learning_rate) {
  if (initial_weights.size() < 2) throw InvalidArgument("Ewf: needs at least 2 experts");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidArgument("Ewf: learning rate must be > 0");
  }
  for (Eigen::Index i = 0; i < initial_weights.size(); ++i) {
    if (!(initial_weights[i] > 0.0) || !std::isfinite(initial_weights[i])) {
      throw InvalidArgument("Ewf: weights must be positive and finite");
    }
    log_weights_[i] = std::log(initial_weights[i]);
  }
  log_weights_.array() -= log_weights_.maxCoeff();
}

ExpertIndex Ewf::choose(RngStream& rng) const {
  const Vector probs = probabilities();
  const double u = rng.uniform01();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return ExpertIndex(static_cast<int>(i) + 1);
  }
  // u landed in the rounding slack above the last partial sum.
  Eigen::Index last = probs.size() - 1;
  while (last > 0 && probs[last] == 0.0) --last;
  return ExpertIndex(static_cast<int>(last) + 1);
}

void Ewf::update(const PayoffVector& p, double importance_weight) {
  if (p.size() != experts()) throw InvalidArgument("Ewf: payoff dimension mismatch");
  if (!(importance_weight >= 1.0)) throw InvalidArgument("Ewf: importance weight must be >= 1");
  const double scale = learning_rate_ * importance_weight;
  for (Eigen::Index i = 0; i < log_weights_.size(); ++i) {
    log_weights_[i] += scale * p[static_cast<int>(i)];
  }
  const double top = log_weights_.maxCoeff();
  if (!std::isfinite(top)) throw OverflowError("Ewf: non-finite weight after update");
  log_weights_.array() -= top;
}

Vector Ewf::weights() const {
  Vector w = log_weights_.array().exp().matrix();
  return w.cwiseMax(std::numeric_limits<double>::min());
}

Vector Ewf::probabilities() const {
  const Vector w = weights();
  return w / w.sum();
}

double Ewf::default_learning_rate(int n, double rounds) {
  if (n < 2 || !(rounds > 0.0)) throw InvalidArgument("Ewf: need n >= 2 and rounds > 0");
  return std::sqrt(8.0 * std::log(static_cast<double>(n)) / rounds);
}

}  // namespace distexp
