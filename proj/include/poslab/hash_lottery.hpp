#pragma once

// Threshold hash lotteries: a miner is eligible at tick T when
// prf64(seed, slot_salt, T) < D * stake (* coin_age for Peercoin).

#include <cstdint>
#include <optional>
#include <vector>

#include "poslab/prf.hpp"
#include "poslab/stake_model.hpp"

namespace poslab {

enum class LotteryMode { kPeercoin, kBlackcoinNxt };

LotteryMode lottery_mode_for(Mechanism mechanism);
Weighting weighting_for(LotteryMode mode);

// Thresholds live in [0, 2^64]; 2^64 is the saturated value every hash is
// below.
using Threshold = unsigned __int128;
inline constexpr Threshold kHashRange = Threshold{1} << 64;

Threshold eligibility_threshold(const MinerAccount& miner,
                                std::uint64_t difficulty, LotteryMode mode);

struct TickEligibility {
  std::uint64_t miner_id = 0;
  std::uint64_t tick = 0;
  std::uint64_t proofhash = 0;
  bool eligible = false;
};

TickEligibility eligibility(const MinerAccount& miner, std::uint64_t slot_salt,
                            std::uint64_t tick, const LotteryParams& params,
                            LotteryMode mode);

struct SlotOutcome {
  std::uint64_t slot = 0;
  std::optional<std::uint64_t> winner;  // miner id
  std::optional<std::uint64_t> winning_tick;
  std::optional<std::uint64_t> winning_hash;

  bool empty() const { return !winner.has_value(); }
};

// Precomputes thresholds for one scenario so slots can be evaluated cheaply
// and concurrently; run_slot is const and pure.
class HashLottery {
 public:
  HashLottery(const Scenario& scenario, LotteryMode mode);

  SlotOutcome run_slot(std::uint64_t slot) const;

  // Index into the scenario's miner list, or nullopt for an empty slot.
  std::optional<std::size_t> winner_index(std::uint64_t slot) const;

 private:
  struct Entrant {
    std::size_t index;
    std::uint64_t id;
    std::uint64_t seed;
    Threshold threshold;
  };

  struct Hit {
    std::size_t entrant;
    std::uint64_t tick;
    std::uint64_t hash;
  };

  std::optional<Hit> resolve(std::uint64_t slot) const;

  std::vector<Entrant> entrants_;  // miners with a non-zero threshold
  std::uint64_t master_seed_;
  std::uint64_t tick_limit_;
};

/// First tick with at least one eligible miner wins; among the eligible the
/// lowest proofhash wins, ties to the lowest miner id. Empty when no tick in
/// [0, tick_limit) has an eligible miner.
SlotOutcome run_lottery_slot(const Scenario& scenario, std::uint64_t slot,
                             LotteryMode mode);

/// Largest D with sum_i D * w_i / 2^64 <= target_rate (so no miner is
/// eligible with certainty unless it is alone at rate 1).
std::uint64_t calibrate_difficulty(const Scenario& scenario, double target_rate,
                                   LotteryMode mode);

}  // namespace poslab
