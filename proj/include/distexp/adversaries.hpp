#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "distexp/core.hpp"
#include "distexp/protocol.hpp"

namespace distexp {

enum class AdversaryKind {
  Zigzag,
  Markov,
  BlockCoin,
  AdaptiveBlock,
  CounterPermutation,
  AppendixD,
  IidUniform,  ///< i.i.d. uniform [0, 1] entries
  Bernoulli,   ///< i.i.d. Bernoulli entries, expert 1 ahead by `gap`
  Custom,      ///< explicit payoff list
};

enum class SiteAllocation { Cyclic, SingleSite, PermutationPerBlock };

std::string to_string(AdversaryKind kind);
AdversaryKind parse_adversary_kind(const std::string& name);

/// Declarative description of a payoff/site sequence.
struct AdversarySpec {
  AdversaryKind kind = AdversaryKind::Zigzag;
  /// Named parameters: mu, lambda, block, index, gap.
  std::map<std::string, double> params;
  SiteAllocation allocation = SiteAllocation::Cyclic;
  /// Payoffs and (optional) sites for AdversaryKind::Custom, replayed cyclically.
  std::vector<PayoffVector> custom_payoffs;
  std::vector<int> custom_sites;

  double param(const std::string& name, double fallback) const;
  double required(const std::string& name) const;
  /// "name=value;..." in key order.
  std::string params_string() const;
  bool adaptive() const { return kind == AdversaryKind::AdaptiveBlock; }
};

AdversarySpec zigzag_spec(std::int64_t mu);
AdversarySpec markov_spec(double lambda);
AdversarySpec block_coin_spec(std::int64_t block);
AdversarySpec adaptive_block_spec();
AdversarySpec counter_permutation_spec();
AdversarySpec appendix_d_spec(std::int64_t index, std::int64_t lambda);
AdversarySpec iid_uniform_spec();
AdversarySpec bernoulli_spec(double gap);
AdversarySpec custom_spec(std::vector<PayoffVector> payoffs, std::vector<int> sites = {});

struct Query {
  int site = 0;  ///< 0-based site receiving the query and the payoff
  PayoffVector payoff;
};

/// Streaming generator of (site, payoff) pairs for t = 1..T.
class Adversary {
 public:
  virtual ~Adversary() = default;
  /// Produces step t. Oblivious generators ignore comm; adaptive ones read
  /// only the communication pattern of steps before t.
  virtual Query next(std::int64_t t, const CommObservation* comm) = 0;
  virtual bool adaptive() const { return false; }
};

/// Builds a generator. The adversary's randomness comes from
/// RngStream(seed, streams::kAdversary).
std::unique_ptr<Adversary> make_adversary(const AdversarySpec& spec, std::int64_t T, int k,
                                          int n, std::uint64_t seed);

/// Materializes an oblivious sequence (throws ConfigurationError for adaptive specs).
std::vector<Query> generate_sequence(const AdversarySpec& spec, std::int64_t T, int k, int n,
                                     std::uint64_t seed);

// -- Sequence helpers (oblivious constructions as plain functions) ----------

/// Zig-zag payoff at step t: mu steps of (1,0), then alternating runs of 2 mu.
PayoffVector zigzag_payoff(std::int64_t mu, std::int64_t t);

/// g(t) = p[1] - p[2] of the base sequence p_(0): blocks of lambda steps
/// following the sign pattern -, +, +, -, -, +, +, ...
int appendix_d_base_sign(std::int64_t lambda, std::int64_t t);

/// p_(i) at step t: p_(0) up to (2i - 1) lambda, then constant (1,0) for even
/// i and (0,1) for odd i.
PayoffVector appendix_d_payoff(std::int64_t index, std::int64_t lambda, std::int64_t t);

/// Throws InvalidArgument, naming the nearest valid horizon, unless
/// T = (4m + 3) lambda (index 0) or (2 index - 1) lambda < T (index > 0).
void validate_appendix_d(std::int64_t index, std::int64_t lambda, std::int64_t T);

}  // namespace distexp
