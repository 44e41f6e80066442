#pragma once

// Closed-form next-block probability models, in exact rational arithmetic.

#include <cstdint>
#include <vector>

#include "poslab/stake_model.hpp"

namespace poslab {

// alpha: one miner's stake; beta: total stake. 0 <= alpha <= beta, beta > 0.
class StakeQuery {
 public:
  // Throws kInvalidParameter when the invariants do not hold.
  StakeQuery(std::uint64_t alpha, std::uint64_t beta);

  std::uint64_t alpha() const { return alpha_; }
  std::uint64_t beta() const { return beta_; }

  // 2 * alpha >= beta, evaluated without rounding.
  bool is_majority() const;

 private:
  std::uint64_t alpha_;
  std::uint64_t beta_;
};

/// alpha/beta below one half, exactly 1 at or above it.
Rational saad_next_block_probability(const StakeQuery& q);

/// alpha/beta.
Rational proportional_next_block_probability(const StakeQuery& q);

/// Per-miner leader probabilities for the scenario's mechanism:
/// s_i a_i / sum(s_k a_k) for PeercoinAge, s_i / sum(s_k) for the other
/// mechanisms, and the per-miner saad probability for SaadModel (that vector
/// can sum to more than 1). Throws kZeroTotalWeight.
std::vector<Rational> theoretical_selection_probabilities(
    const Scenario& scenario);

/// The distribution the simulator actually samples. Equal to the theoretical
/// vector except for SaadModel with a majority staker, where that staker
/// (the lowest-index one, or `preferred` when it qualifies) gets 1 and
/// everyone else 0.
std::vector<Rational> simulated_selection_probabilities(
    const Scenario& scenario,
    std::optional<std::size_t> preferred = std::nullopt);

/// Index of the miner the SaadModel always elects, if any.
std::optional<std::size_t> saad_majority_miner(
    const Scenario& scenario,
    std::optional<std::size_t> preferred = std::nullopt);

std::uint64_t total_stake(const Scenario& scenario);

}  // namespace poslab
