#include "distexp/adversaries.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace distexp {

namespace {

constexpr std::uint64_t kAllocationSalt = 1;

const PayoffVector& heads() {
  static const PayoffVector p{1.0, 0.0};
  return p;
}
const PayoffVector& tails() {
  static const PayoffVector p{0.0, 1.0};
  return p;
}

std::int64_t positive_param(const AdversarySpec& spec, const std::string& name) {
  const double v = spec.required(name);
  if (!(v >= 1.0) || v != std::floor(v)) {
    throw InvalidArgument(to_string(spec.kind) + ": " + name + " must be an integer >= 1");
  }
  return static_cast<std::int64_t>(v);
}

void require_two_experts(const AdversarySpec& spec, int n) {
  if (n != 2) {
    throw UnsupportedArity(to_string(spec.kind) + " generates 2-expert payoffs, got n = " +
                           std::to_string(n));
  }
}

/// Maps steps to sites for the generic allocation policies.
class SiteAllocator {
 public:
  SiteAllocator(SiteAllocation policy, int k, RngStream rng)
      : policy_(policy), k_(k), rng_(rng), order_(static_cast<std::size_t>(k)) {}

  int site(std::int64_t t) {
    switch (policy_) {
      case SiteAllocation::SingleSite:
        return 0;
      case SiteAllocation::Cyclic:
        return static_cast<int>((t - 1) % k_);
      case SiteAllocation::PermutationPerBlock: {
        const std::int64_t pos = (t - 1) % k_;
        if (pos == 0) reshuffle();
        return order_[static_cast<std::size_t>(pos)];
      }
    }
    return 0;
  }

 private:
  void reshuffle() {
    std::iota(order_.begin(), order_.end(), 0);
    for (std::size_t i = order_.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng_.uniform_index(i));
      std::swap(order_[i - 1], order_[j]);
    }
  }

  SiteAllocation policy_;
  int k_;
  RngStream rng_;
  std::vector<int> order_;
};

class ObliviousBase : public Adversary {
 public:
  ObliviousBase(const AdversarySpec& spec, int k, std::uint64_t seed)
      : rng_(seed, streams::kAdversary),
        sites_(spec.allocation, k, rng_.substream(kAllocationSalt)) {}

 protected:
  RngStream rng_;
  SiteAllocator sites_;
};

class ZigzagAdversary final : public ObliviousBase {
 public:
  ZigzagAdversary(const AdversarySpec& spec, int k, std::uint64_t seed)
      : ObliviousBase(spec, k, seed), mu_(positive_param(spec, "mu")) {}
  Query next(std::int64_t t, const CommObservation*) override {
    return {sites_.site(t), zigzag_payoff(mu_, t)};
  }

 private:
  std::int64_t mu_;
};

class MarkovAdversary final : public ObliviousBase {
 public:
  MarkovAdversary(const AdversarySpec& spec, int k, std::uint64_t seed)
      : ObliviousBase(spec, k, seed) {
    const double lambda = spec.required("lambda");
    if (!(lambda >= 0.5) || !std::isfinite(lambda)) {
      throw InvalidArgument("markov: lambda must be >= 1/2");
    }
    switch_probability_ = 1.0 / (2.0 * lambda);
  }
  Query next(std::int64_t t, const CommObservation*) override {
    if (t == 1) {
      first_ = rng_.bernoulli(0.5);
    } else if (rng_.bernoulli(switch_probability_)) {
      first_ = !first_;
    }
    return {sites_.site(t), first_ ? heads() : tails()};
  }

 private:
  double switch_probability_ = 1.0;
  bool first_ = true;
};

class BlockCoinAdversary final : public ObliviousBase {
 public:
  BlockCoinAdversary(const AdversarySpec& spec, int k, std::uint64_t seed)
      : ObliviousBase(spec, k, seed),
        block_(positive_param(spec, "block")),
        k_(k),
        cyclic_(spec.allocation == SiteAllocation::Cyclic) {}
  Query next(std::int64_t t, const CommObservation*) override {
    const std::int64_t pos = (t - 1) % block_;
    if (pos == 0) heads_ = rng_.bernoulli(0.5);
    // Within a block, queries visit distinct sites in cyclic order.
    const int site = cyclic_ ? static_cast<int>(pos % k_) : sites_.site(t);
    return {site, heads_ ? heads() : tails()};
  }

 private:
  std::int64_t block_;
  int k_;
  bool cyclic_;
  bool heads_ = true;
};

class AdaptiveBlockAdversary final : public Adversary {
 public:
  AdaptiveBlockAdversary(const AdversarySpec& spec, std::int64_t T, int k, std::uint64_t seed)
      : rng_(seed, streams::kAdversary), block_(static_cast<std::int64_t>(spec.param("block", k))) {
    if (block_ < 1) throw InvalidArgument("adaptive_block: block must be >= 1");
    if (T % block_ != 0) {
      throw ConfigurationError("adaptive_block: T = " + std::to_string(T) +
                               " must be divisible by the block size " + std::to_string(block_));
    }
    k_ = k;
  }
  bool adaptive() const override { return true; }
  Query next(std::int64_t t, const CommObservation* comm) override {
    if (comm == nullptr) {
      throw ConfigurationError("adaptive_block requires the communication view (adaptive mode)");
    }
    const std::int64_t pos = (t - 1) % block_;
    const std::int64_t block_start = t - pos;
    if (pos == 0) default_heads_ = rng_.bernoulli(0.5);
    bool heads_now = default_heads_;
    if (comm->any_message_in(block_start, t - 1)) heads_now = rng_.bernoulli(0.5);
    return {static_cast<int>(pos % k_), heads_now ? heads() : tails()};
  }

 private:
  RngStream rng_;
  std::int64_t block_;
  int k_ = 1;
  bool default_heads_ = true;
};

class CounterPermutationAdversary final : public ObliviousBase {
 public:
  CounterPermutationAdversary(const AdversarySpec& spec, std::int64_t T, int k, int n,
                              std::uint64_t seed)
      : ObliviousBase(spec, k, seed), unit_(Vector::Ones(n)) {
    if (T % k != 0) {
      throw ConfigurationError("counter_permutation: T = " + std::to_string(T) +
                               " must be divisible by k = " + std::to_string(k));
    }
  }
  Query next(std::int64_t t, const CommObservation*) override { return {sites_.site(t), unit_}; }

 private:
  PayoffVector unit_;
};

class AppendixDAdversary final : public ObliviousBase {
 public:
  AppendixDAdversary(const AdversarySpec& spec, std::int64_t T, int k, std::uint64_t seed)
      : ObliviousBase(spec, k, seed),
        index_(static_cast<std::int64_t>(spec.param("index", 0))),
        lambda_(positive_param(spec, "lambda")) {
    if (index_ < 0) throw InvalidArgument("appendix_d: index must be >= 0");
    validate_appendix_d(index_, lambda_, T);
  }
  Query next(std::int64_t t, const CommObservation*) override {
    return {sites_.site(t), appendix_d_payoff(index_, lambda_, t)};
  }

 private:
  std::int64_t index_;
  std::int64_t lambda_;
};

class IidAdversary final : public ObliviousBase {
 public:
  IidAdversary(const AdversarySpec& spec, int k, int n, std::uint64_t seed, bool bernoulli)
      : ObliviousBase(spec, k, seed), n_(n), bernoulli_(bernoulli), gap_(spec.param("gap", 0.2)) {
    if (bernoulli_ && !(gap_ >= 0.0 && gap_ <= 1.0)) {
      throw InvalidArgument("bernoulli: gap must lie in [0, 1]");
    }
  }
  Query next(std::int64_t t, const CommObservation*) override {
    Vector v(n_);
    for (int i = 0; i < n_; ++i) {
      if (bernoulli_) {
        const double mean = i == 0 ? 0.5 + gap_ / 2.0 : 0.5 - gap_ / 2.0;
        v[i] = rng_.bernoulli(mean) ? 1.0 : 0.0;
      } else {
        v[i] = rng_.uniform01();
      }
    }
    return {sites_.site(t), PayoffVector(std::move(v))};
  }

 private:
  int n_;
  bool bernoulli_;
  double gap_;
};

class CustomAdversary final : public ObliviousBase {
 public:
  CustomAdversary(const AdversarySpec& spec, int k, int n, std::uint64_t seed)
      : ObliviousBase(spec, k, seed), payoffs_(spec.custom_payoffs), sites_list_(spec.custom_sites) {
    if (payoffs_.empty()) throw InvalidArgument("custom: empty payoff list");
    for (const auto& p : payoffs_) {
      if (p.size() != n) throw InvalidArgument("custom: payoff dimension does not match n");
    }
    for (int s : sites_list_) {
      if (s < 0 || s >= k) throw InvalidArgument("custom: site index outside [0, k)");
    }
  }
  Query next(std::int64_t t, const CommObservation*) override {
    const auto i = static_cast<std::size_t>(t - 1);
    const int site = sites_list_.empty() ? sites_.site(t) : sites_list_[i % sites_list_.size()];
    return {site, payoffs_[i % payoffs_.size()]};
  }

 private:
  std::vector<PayoffVector> payoffs_;
  std::vector<int> sites_list_;
};

}  // namespace

std::string to_string(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::Zigzag: return "zigzag";
    case AdversaryKind::Markov: return "markov";
    case AdversaryKind::BlockCoin: return "block_coin";
    case AdversaryKind::AdaptiveBlock: return "adaptive_block";
    case AdversaryKind::CounterPermutation: return "counter_permutation";
    case AdversaryKind::AppendixD: return "appendix_d";
    case AdversaryKind::IidUniform: return "iid_uniform";
    case AdversaryKind::Bernoulli: return "bernoulli";
    case AdversaryKind::Custom: return "custom";
  }
  return "unknown";
}

AdversaryKind parse_adversary_kind(const std::string& name) {
  for (auto kind : {AdversaryKind::Zigzag, AdversaryKind::Markov, AdversaryKind::BlockCoin,
                    AdversaryKind::AdaptiveBlock, AdversaryKind::CounterPermutation,
                    AdversaryKind::AppendixD, AdversaryKind::IidUniform, AdversaryKind::Bernoulli,
                    AdversaryKind::Custom}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigurationError("unknown adversary '" + name + "'");
}

double AdversarySpec::param(const std::string& name, double fallback) const {
  auto it = params.find(name);
  return it == params.end() ? fallback : it->second;
}

double AdversarySpec::required(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) {
    throw ConfigurationError(to_string(kind) + ": missing parameter '" + name + "'");
  }
  return it->second;
}

std::string AdversarySpec::params_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, value] : params) {
    if (!first) os << ';';
    os << name << '=' << format_real(value);
    first = false;
  }
  return os.str();
}

namespace {
AdversarySpec spec_of(AdversaryKind kind, std::map<std::string, double> params = {}) {
  AdversarySpec s;
  s.kind = kind;
  s.params = std::move(params);
  return s;
}
}  // namespace

AdversarySpec zigzag_spec(std::int64_t mu) {
  return spec_of(AdversaryKind::Zigzag, {{"mu", static_cast<double>(mu)}});
}
AdversarySpec markov_spec(double lambda) { return spec_of(AdversaryKind::Markov, {{"lambda", lambda}}); }
AdversarySpec block_coin_spec(std::int64_t block) {
  return spec_of(AdversaryKind::BlockCoin, {{"block", static_cast<double>(block)}});
}
AdversarySpec adaptive_block_spec() { return spec_of(AdversaryKind::AdaptiveBlock, {}); }
AdversarySpec counter_permutation_spec() {
  AdversarySpec s = spec_of(AdversaryKind::CounterPermutation, {});
  s.allocation = SiteAllocation::PermutationPerBlock;
  return s;
}
AdversarySpec appendix_d_spec(std::int64_t index, std::int64_t lambda) {
  AdversarySpec s = spec_of(
      AdversaryKind::AppendixD,
      {{"index", static_cast<double>(index)}, {"lambda", static_cast<double>(lambda)}});
  s.allocation = SiteAllocation::SingleSite;
  return s;
}
AdversarySpec iid_uniform_spec() { return spec_of(AdversaryKind::IidUniform, {}); }
AdversarySpec bernoulli_spec(double gap) { return spec_of(AdversaryKind::Bernoulli, {{"gap", gap}}); }
AdversarySpec custom_spec(std::vector<PayoffVector> payoffs, std::vector<int> sites) {
  AdversarySpec s = spec_of(AdversaryKind::Custom, {});
  s.custom_payoffs = std::move(payoffs);
  s.custom_sites = std::move(sites);
  return s;
}

std::unique_ptr<Adversary> make_adversary(const AdversarySpec& spec, std::int64_t T, int k, int n,
                                          std::uint64_t seed) {
  if (k < 1) throw ConfigurationError("need at least one site");
  switch (spec.kind) {
    case AdversaryKind::Zigzag:
      require_two_experts(spec, n);
      return std::make_unique<ZigzagAdversary>(spec, k, seed);
    case AdversaryKind::Markov:
      require_two_experts(spec, n);
      return std::make_unique<MarkovAdversary>(spec, k, seed);
    case AdversaryKind::BlockCoin:
      require_two_experts(spec, n);
      return std::make_unique<BlockCoinAdversary>(spec, k, seed);
    case AdversaryKind::AdaptiveBlock:
      require_two_experts(spec, n);
      return std::make_unique<AdaptiveBlockAdversary>(spec, T, k, seed);
    case AdversaryKind::CounterPermutation:
      return std::make_unique<CounterPermutationAdversary>(spec, T, k, n, seed);
    case AdversaryKind::AppendixD:
      require_two_experts(spec, n);
      return std::make_unique<AppendixDAdversary>(spec, T, k, seed);
    case AdversaryKind::IidUniform:
      return std::make_unique<IidAdversary>(spec, k, n, seed, false);
    case AdversaryKind::Bernoulli:
      return std::make_unique<IidAdversary>(spec, k, n, seed, true);
    case AdversaryKind::Custom:
      return std::make_unique<CustomAdversary>(spec, k, n, seed);
  }
  throw ConfigurationError("unsupported adversary");
}

std::vector<Query> generate_sequence(const AdversarySpec& spec, std::int64_t T, int k, int n,
                                     std::uint64_t seed) {
  if (spec.adaptive()) {
    throw ConfigurationError("adaptive adversaries have no fixed sequence to materialize");
  }
  auto adversary = make_adversary(spec, T, k, n, seed);
  std::vector<Query> out;
  out.reserve(static_cast<std::size_t>(T));
  for (std::int64_t t = 1; t <= T; ++t) out.push_back(adversary->next(t, nullptr));
  return out;
}

PayoffVector zigzag_payoff(std::int64_t mu, std::int64_t t) {
  if (mu < 1) throw InvalidArgument("zigzag: mu must be >= 1");
  if (t <= mu) return heads();
  const std::int64_t run = (t - mu - 1) / (2 * mu);
  return run % 2 == 0 ? tails() : heads();
}

int appendix_d_base_sign(std::int64_t lambda, std::int64_t t) {
  if (lambda < 1) throw InvalidArgument("appendix_d: lambda must be >= 1");
  const std::int64_t block = (t - 1) / lambda;
  const std::int64_t pair = (block + 1) / 2;
  return pair % 2 == 0 ? -1 : 1;
}

PayoffVector appendix_d_payoff(std::int64_t index, std::int64_t lambda, std::int64_t t) {
  if (index > 0 && t > (2 * index - 1) * lambda) return index % 2 == 0 ? heads() : tails();
  return appendix_d_base_sign(lambda, t) > 0 ? heads() : tails();
}

void validate_appendix_d(std::int64_t index, std::int64_t lambda, std::int64_t T) {
  if (lambda < 1) throw InvalidArgument("appendix_d: lambda must be >= 1");
  if (index == 0) {
    if (T % lambda == 0 && (T / lambda) % 4 == 3) return;
    const double m = std::max(0.0, std::round((static_cast<double>(T) / lambda - 3.0) / 4.0));
    const auto nearest = (4 * static_cast<std::int64_t>(m) + 3) * lambda;
    throw InvalidArgument("appendix_d: index 0 needs T = (4m + 3) lambda; nearest valid T is " +
                          std::to_string(nearest));
  }
  if ((2 * index - 1) * lambda >= T) {
    throw InvalidArgument("appendix_d: (2i - 1) lambda = " +
                          std::to_string((2 * index - 1) * lambda) + " must be below T = " +
                          std::to_string(T));
  }
}

}  // namespace distexp
