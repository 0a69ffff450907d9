#include "distexp/dfpl.hpp"

#include <cmath>
#include <sstream>

namespace distexp {

namespace {

constexpr std::uint64_t kPhaseSalt = 11;
constexpr std::uint64_t kNoiseSalt = 12;
constexpr std::uint64_t kStepSalt = 13;

std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

double default_block_noise(std::int64_t T, std::int64_t ell) {
  return std::pow(static_cast<double>(ell), 5.0 / 12.0) * std::sqrt(static_cast<double>(T));
}

DfplParams make_params(std::int64_t T, std::int64_t ell, double eta) {
  if (ell < 1) throw InvalidArgument("DFPL: block length must be >= 1");
  if (T < ell) {
    throw InvalidArgument("DFPL: horizon T = " + std::to_string(T) +
                          " is shorter than the block length " + std::to_string(ell));
  }
  if (T % ell != 0) {
    throw InvalidArgument("DFPL: T = " + std::to_string(T) + " is not a multiple of ell = " +
                          std::to_string(ell));
  }
  DfplParams p;
  p.T = T;
  p.ell = ell;
  p.b = T / ell;
  p.eta = eta > 0.0 ? eta : default_block_noise(T, ell);
  p.eta_prime = std::sqrt(static_cast<double>(ell));
  const double l = static_cast<double>(ell);
  const double t = static_cast<double>(T);
  const double q = 2.0 * l * l * l * t * t / std::pow(p.eta, 5.0);
  if (q > 1.0) {
    p.warnings.push_back("step-phase probability " + fmt_double(q) + " clamped to 1");
  }
  p.q = std::min(1.0, std::max(0.0, q));
  return p;
}

DfplParams derive_params(std::int64_t T, int k, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.2)) {
    throw InvalidArgument("DFPL: epsilon must lie in (0, 1/5), got " + fmt_double(epsilon));
  }
  if (k < 2) throw InvalidArgument("DFPL: need k >= 2 sites");
  const double target = std::pow(static_cast<double>(k), 1.0 + epsilon);
  const auto rounded = std::max<std::int64_t>(1, std::llround(target));
  if (T < rounded) {
    throw InvalidArgument("DFPL: horizon T = " + std::to_string(T) +
                          " is shorter than the block length " + std::to_string(rounded));
  }

  std::vector<std::string> warnings;
  const double regime = 2.0 * std::pow(static_cast<double>(k), 2.3);
  if (static_cast<double>(T) < regime) {
    warnings.push_back("T = " + std::to_string(T) + " is below 2 k^2.3 = " + fmt_double(regime) +
                       "; regret guarantees do not apply");
  }

  std::int64_t ell = 0;
  for (auto d = static_cast<std::int64_t>(std::floor(target)); d >= 1; --d) {
    if (T % d == 0) {
      if (static_cast<double>(d) >= 0.75 * target) ell = d;
      break;
    }
  }
  std::int64_t horizon = T;
  if (ell == 0) {
    ell = rounded;
    horizon = (T / ell) * ell;
    warnings.push_back("no divisor of T within 25% of k^(1+eps); T truncated from " +
                       std::to_string(T) + " to " + std::to_string(horizon));
  }

  DfplParams p = make_params(horizon, ell);
  warnings.insert(warnings.end(), p.warnings.begin(), p.warnings.end());
  p.warnings = std::move(warnings);
  return p;
}

std::vector<std::int64_t> block_schedule(const DfplParams& params, double relative_slack,
                                         RngStream* rng) {
  std::vector<std::int64_t> lengths;
  if (rng == nullptr || relative_slack <= 0.0) {
    lengths.assign(static_cast<std::size_t>(params.b), params.ell);
    return lengths;
  }
  const double l = static_cast<double>(params.ell);
  auto lo = static_cast<std::int64_t>(std::ceil((1.0 - relative_slack) * l - 1e-9));
  auto hi = static_cast<std::int64_t>(std::floor((1.0 + relative_slack) * l + 1e-9));
  lo = std::max<std::int64_t>(lo, 1);
  hi = std::max(hi, lo);
  std::int64_t covered = 0;
  while (covered < params.T) {
    auto len = lo + static_cast<std::int64_t>(rng->uniform_index(static_cast<std::uint64_t>(hi - lo + 1)));
    len = std::min(len, params.T - covered);
    lengths.push_back(len);
    covered += len;
  }
  return lengths;
}

// -- Dfpl --------------------------------------------------------------------

Dfpl::Dfpl(DfplParams params, RngStream rng)
    : Dfpl(params, rng, block_schedule(params, 0.0, nullptr)) {}

Dfpl::Dfpl(DfplParams params, RngStream rng, std::vector<std::int64_t> schedule)
    : params_(std::move(params)),
      schedule_(std::move(schedule)),
      phase_rng_(rng.substream(kPhaseSalt)),
      noise_rng_(rng.substream(kNoiseSalt)),
      step_rng_(rng.substream(kStepSalt)),
      Q_(2),
      P_(2) {
  if (schedule_.empty()) schedule_ = block_schedule(params_, 0.0, nullptr);
}

std::int64_t Dfpl::current_block_length() const {
  if (finished()) return 0;
  return schedule_[static_cast<std::size_t>(block_index_)];
}

void Dfpl::begin_block() {
  if (block_open_) throw ProtocolViolation("DFPL: begin_block while a block is open");
  if (finished()) throw ProtocolViolation("DFPL: all blocks already played");
  const bool step_phase = phase_rng_.bernoulli(params_.q);
  phase_ = step_phase ? DfplPhase::Step : DfplPhase::Block;
  phases_.push_back(phase_);
  P_ = CumulativePayoff(2);
  step_in_block_ = 0;
  if (step_phase) {
    step_fpl_ = std::make_unique<Fpl>(2, params_.eta_prime, step_rng_);
  } else {
    step_fpl_.reset();
    const double r1 = params_.eta * noise_rng_.uniform01();
    const double r2 = params_.eta * noise_rng_.uniform01();
    block_action_ = argmax_selector(Q_[0] + r1, Q_[1] + r2);
  }
  block_open_ = true;
}

ExpertIndex Dfpl::choose() {
  if (!block_open_) throw ProtocolViolation("DFPL: choose outside an open block");
  if (awaiting_payoff_) throw ProtocolViolation("DFPL: choose called twice without a payoff");
  awaiting_payoff_ = true;
  return phase_ == DfplPhase::Step ? step_fpl_->choose() : block_action_;
}

bool Dfpl::observe(const PayoffVector& p) {
  if (!awaiting_payoff_) throw ProtocolViolation("DFPL: payoff before choice");
  if (p.size() != 2) throw InvalidArgument("DFPL: expects 2-expert payoffs");
  awaiting_payoff_ = false;
  P_.add(p);
  if (phase_ == DfplPhase::Step) step_fpl_->update(p);
  ++step_in_block_;
  if (step_in_block_ < current_block_length()) return false;

  Q_.add(P_);
  if (step_fpl_) {
    step_rng_ = step_fpl_->rng();
    step_fpl_.reset();
  }
  block_open_ = false;
  ++block_index_;
  return true;
}

// -- DfplTree ----------------------------------------------------------------

DfplTree::DfplTree(int n, const DfplParams& params, RngStream rng,
                   std::vector<std::int64_t> schedule)
    : n_(n) {
  if (n < 2) throw InvalidArgument("DfplTree: need n >= 2");
  leaves_ = 1;
  depth_ = 0;
  while (leaves_ < n) {
    leaves_ *= 2;
    ++depth_;
  }
  if (schedule.empty()) schedule = block_schedule(params, 0.0, nullptr);
  nodes_.resize(static_cast<std::size_t>(2 * leaves_));
  choice_.assign(static_cast<std::size_t>(2 * leaves_), 0);
  real_.assign(static_cast<std::size_t>(2 * leaves_), false);
  for (int leaf = 0; leaf < leaves_; ++leaf) real_[static_cast<std::size_t>(leaves_ + leaf)] = leaf < n;
  for (int id = leaves_ - 1; id >= 1; --id) {
    const bool left = real_[static_cast<std::size_t>(2 * id)];
    const bool right = real_[static_cast<std::size_t>(2 * id + 1)];
    real_[static_cast<std::size_t>(id)] = left || right;
    if (left && right) {
      // The root keeps the caller's stream.
      RngStream node_rng = id == 1 ? rng : rng.substream(static_cast<std::uint64_t>(id));
      nodes_[static_cast<std::size_t>(id)] = std::make_unique<Dfpl>(params, node_rng, schedule);
    }
  }
}

int DfplTree::active_nodes() const {
  int count = 0;
  for (const auto& node : nodes_) count += node ? 1 : 0;
  return count;
}

const Dfpl* DfplTree::node(int id) const {
  if (id < 1 || id >= static_cast<int>(nodes_.size())) return nullptr;
  return nodes_[static_cast<std::size_t>(id)].get();
}

std::vector<int> DfplTree::begin_blocks_if_due() {
  std::vector<int> started;
  for (int id = 1; id < leaves_; ++id) {
    auto& node = nodes_[static_cast<std::size_t>(id)];
    if (node && !node->block_open()) {
      node->begin_block();
      started.push_back(id);
    }
  }
  return started;
}

ExpertIndex DfplTree::choose() {
  for (int leaf = 0; leaf < leaves_; ++leaf) choice_[static_cast<std::size_t>(leaves_ + leaf)] = leaf;
  for (int id = leaves_ - 1; id >= 1; --id) {
    auto& node = nodes_[static_cast<std::size_t>(id)];
    int pick = leaf_choice(2 * id);
    if (node) {
      pick = node->choose().value() == 1 ? leaf_choice(2 * id) : leaf_choice(2 * id + 1);
    }
    choice_[static_cast<std::size_t>(id)] = pick;
  }
  return ExpertIndex(leaf_choice(1) + 1);
}

std::vector<int> DfplTree::observe(const PayoffVector& p) {
  if (p.size() != n_) throw InvalidArgument("DfplTree: payoff dimension mismatch");
  std::vector<int> closed;
  auto leaf_payoff = [&](int leaf) { return leaf < n_ ? p[leaf] : 0.0; };
  for (int id = leaves_ - 1; id >= 1; --id) {
    auto& node = nodes_[static_cast<std::size_t>(id)];
    if (!node) continue;
    const PayoffVector pair{leaf_payoff(leaf_choice(2 * id)), leaf_payoff(leaf_choice(2 * id + 1))};
    if (node->observe(pair)) closed.push_back(id);
  }
  return closed;
}

// -- DfplAlgorithm -----------------------------------------------------------

DfplAlgorithm::DfplAlgorithm(int n, const DfplParams& params, RngStream rng,
                             std::vector<std::int64_t> schedule)
    : tree_(n, params, rng, std::move(schedule)) {}

ExpertIndex DfplAlgorithm::choose(int site, Channel& channel) {
  for (int id : tree_.begin_blocks_if_due()) {
    (void)id;
    channel.broadcast(2);  // Q of the node
  }
  for (int id = 1; id < tree_.leaves(); ++id) {
    const Dfpl* node = tree_.node(id);
    if (node && node->phase() == DfplPhase::Step) channel.to_site(site, 2);
  }
  return tree_.choose();
}

void DfplAlgorithm::observe(int site, const PayoffVector& p, Channel& channel) {
  for (int id = 1; id < tree_.leaves(); ++id) {
    const Dfpl* node = tree_.node(id);
    if (node && node->phase() == DfplPhase::Step) channel.to_coordinator(site, 2);
  }
  for (int id : tree_.observe(p)) {
    (void)id;
    for (int s = 0; s < channel.sites(); ++s) channel.to_coordinator(s, 2);
  }
}

double dfpl_expected_messages(const DfplParams& params, int k) {
  const double b = static_cast<double>(params.b);
  return 2.0 * k * b + params.q * b * 2.0 * static_cast<double>(params.ell);
}

}  // namespace distexp
