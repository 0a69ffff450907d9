#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "distexp/core.hpp"
#include "distexp/forecasters.hpp"
#include "distexp/protocol.hpp"

namespace distexp {

/// Block schedule and noise levels of one DFPL instance.
struct DfplParams {
  std::int64_t T = 0;
  std::int64_t ell = 1;     ///< block length
  double eta = 1.0;         ///< block-phase noise
  double eta_prime = 1.0;   ///< step-phase noise, sqrt(ell)
  double q = 1.0;           ///< probability a block runs in step phase
  std::int64_t b = 0;       ///< number of blocks, T / ell
  std::vector<std::string> warnings;
};

/// eta = ell^(5/12) * sqrt(T), the regret-optimal block-phase noise.
double default_block_noise(std::int64_t T, std::int64_t ell);

/// Parameters for an explicit (T, ell). eta <= 0 selects default_block_noise.
/// q = 2 ell^3 T^2 / eta^5 is clamped to [0, 1] with a warning.
DfplParams make_params(std::int64_t T, std::int64_t ell, double eta = 0.0);

/// Parameters from the number of sites: ell targets k^(1 + epsilon), lowered
/// to the largest divisor of T when one lies within 25% of the target;
/// otherwise ell = round(k^(1 + epsilon)) and T is truncated to a multiple of
/// ell. Outside T >= 2 k^2.3 a warning is recorded.
DfplParams derive_params(std::int64_t T, int k, double epsilon);

/// Realized block lengths. Nominal schedules have b blocks of ell steps;
/// jittered ones draw each length uniformly from
/// [ceil((1 - slack) ell), floor((1 + slack) ell)] and cut the last block at T.
std::vector<std::int64_t> block_schedule(const DfplParams& params, double relative_slack,
                                         RngStream* rng);

enum class DfplPhase { Step, Block };

/// Two-expert DFPL. Each block first draws its phase Y_i ~ Bern(q). Step
/// phase runs a fresh FPL(eta') over the block's steps; block phase plays
/// M(Q + r), r ~ U[0, eta]^2, for the whole block. Q absorbs the block's
/// payoffs when it closes, in either phase.
class Dfpl {
 public:
  Dfpl(DfplParams params, RngStream rng);
  Dfpl(DfplParams params, RngStream rng, std::vector<std::int64_t> schedule);

  /// Draws the phase of the next block. Throws ProtocolViolation if a block is open.
  void begin_block();
  ExpertIndex choose();
  /// Returns true when this payoff closed the block.
  bool observe(const PayoffVector& p);

  bool block_open() const { return block_open_; }
  bool finished() const { return block_index_ >= static_cast<std::int64_t>(schedule_.size()); }
  DfplPhase phase() const { return phase_; }
  std::int64_t current_block() const { return block_index_; }
  std::int64_t step_in_block() const { return step_in_block_; }
  std::int64_t current_block_length() const;
  ExpertIndex block_action() const { return block_action_; }
  const CumulativePayoff& block_cumulative() const { return Q_; }
  const CumulativePayoff& block_payoff() const { return P_; }
  const DfplParams& params() const { return params_; }
  const std::vector<std::int64_t>& schedule() const { return schedule_; }
  /// Phases drawn so far, one per started block.
  const std::vector<DfplPhase>& phase_history() const { return phases_; }

 private:
  DfplParams params_;
  std::vector<std::int64_t> schedule_;
  RngStream phase_rng_;
  RngStream noise_rng_;
  RngStream step_rng_;

  CumulativePayoff Q_;
  CumulativePayoff P_;
  std::unique_ptr<Fpl> step_fpl_;
  DfplPhase phase_ = DfplPhase::Block;
  ExpertIndex block_action_{};
  std::int64_t block_index_ = 0;
  std::int64_t step_in_block_ = 0;
  bool block_open_ = false;
  bool awaiting_payoff_ = false;
  std::vector<DfplPhase> phases_;
};

/// DFPL lifted to n experts by a balanced binary tree of independent
/// two-expert instances. Leaves are padded to the next power of two with
/// virtual always-zero experts; a node whose right subtree holds only virtual
/// leaves forwards its left child's choice, so a virtual expert is never played.
class DfplTree {
 public:
  DfplTree(int n, const DfplParams& params, RngStream rng,
           std::vector<std::int64_t> schedule = {});

  int experts() const { return n_; }
  int leaves() const { return leaves_; }
  int depth() const { return depth_; }
  /// Number of internal nodes running a DFPL instance.
  int active_nodes() const;

  /// Starts a block on every active node if a block boundary was reached.
  /// Returns the node ids that started a block.
  std::vector<int> begin_blocks_if_due();
  ExpertIndex choose();
  /// Feeds each node its two-expert payoff. Returns the ids of nodes whose
  /// block closed.
  std::vector<int> observe(const PayoffVector& p);

  const Dfpl* node(int id) const;

 private:
  int leaf_choice(int node) const { return choice_[static_cast<std::size_t>(node)]; }

  int n_;
  int leaves_;
  int depth_;
  // Heap layout: root 1, children 2i and 2i+1, leaves at [leaves_, 2 leaves_).
  std::vector<std::unique_ptr<Dfpl>> nodes_;
  std::vector<int> choice_;  // chosen leaf (0-based) below each node this step
  std::vector<bool> real_;   // subtree contains a real expert
};

/// Site-prediction DFPL protocol. Block boundaries come from the global step
/// counter. Message convention: k for the block-start broadcast of Q, k for
/// the block-end collection of local block payoffs, and 2 per step-phase step
/// (state to the querying site, payoff back). Every tree node pays its own.
class DfplAlgorithm final : public Algorithm {
 public:
  DfplAlgorithm(int n, const DfplParams& params, RngStream rng,
                std::vector<std::int64_t> schedule = {});

  std::string name() const override { return "dfpl"; }
  ModelKind model() const override { return ModelKind::SitePrediction; }
  ExpertIndex choose(int site, Channel& channel) override;
  void observe(int site, const PayoffVector& p, Channel& channel) override;

  const DfplTree& tree() const { return tree_; }

 private:
  DfplTree tree_;
};

/// Expected message count of a two-expert DFPL run under the convention
/// above: 2 k b + q b 2 ell.
double dfpl_expected_messages(const DfplParams& params, int k);

}  // namespace distexp
