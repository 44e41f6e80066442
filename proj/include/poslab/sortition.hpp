#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "poslab/stake_model.hpp"

namespace poslab {

/// Election function F: inverse-CDF lookup of `draw` in the cumulative
/// weights. Returns i with draw in [sum_{k<i} w_k, sum_{k<=i} w_k).
/// Throws kMalformedWeights on negative weights or |sum - 1| > 2^-40.
std::size_t ouroboros_select(std::span<const double> weights, double draw);

// Validated cumulative table for repeated ouroboros_select calls.
class StakeCdf {
 public:
  explicit StakeCdf(std::span<const double> weights);

  std::size_t select(double draw) const;

 private:
  std::vector<double> upper_;  // upper_[i] = sum_{k<=i} w_k
  std::size_t last_positive_ = 0;
};

struct UnitAccount {
  std::uint64_t seed = 0;
  std::uint64_t stake = 0;
};

struct UnitAccountSet {
  std::uint64_t owner_id = 0;
  std::vector<UnitAccount> accounts;
};

/// Splits a miner's stake into stake/unit accounts of `unit` tokens each,
/// seeded prf64(miner.seed, j, 1). Throws kIndivisibleStake or
/// kInvalidParameter (unit == 0).
UnitAccountSet split_stake(const MinerAccount& miner, std::uint64_t unit);

struct Participant {
  std::uint64_t account_seed = 0;
  std::uint64_t stake = 0;
  std::size_t owner = 0;  // index of the owning miner
};

/// Lowest-hash sortition: account k hashes prf64(seed_k, slot_salt, 0) and the
/// owner of the minimum wins, ties to the lowest account seed. When account
/// stakes differ, each account races with key -ln(1 - u_k) / stake_k, which is
/// distributed as the minimum over `stake_k` unit tokens.
/// Throws kEmptyParticipantSet if no account holds stake.
std::size_t algorand_select(std::span<const Participant> participants,
                            std::uint64_t slot_salt);

/// Every miner's split accounts, flattened. `units` gives one split unit per
/// miner (miners with zero stake contribute nothing).
std::vector<Participant> build_participants(
    std::span<const MinerAccount> miners, std::span<const std::uint64_t> units);

/// gcd of all positive stakes.
std::uint64_t common_stake_unit(std::span<const MinerAccount> miners);

}  // namespace poslab
