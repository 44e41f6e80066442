#include "poslab/hash_lottery.hpp"

#include <cmath>

#include "poslab/error.hpp"

namespace poslab {

LotteryMode lottery_mode_for(Mechanism mechanism) {
  return mechanism == Mechanism::kPeercoinAge ? LotteryMode::kPeercoin
                                              : LotteryMode::kBlackcoinNxt;
}

Weighting weighting_for(LotteryMode mode) {
  return mode == LotteryMode::kPeercoin ? Weighting::kStakeTimesAge
                                        : Weighting::kStakeOnly;
}

Threshold eligibility_threshold(const MinerAccount& miner,
                                std::uint64_t difficulty, LotteryMode mode) {
  const unsigned __int128 weight = miner_weight(miner, weighting_for(mode));
  if (weight == 0 || difficulty == 0) return 0;
  // D * w > 2^64  <=>  w > 2^64 / D, checked without overflowing 128 bits.
  if (weight > kHashRange / difficulty) return kHashRange;
  const Threshold product = weight * difficulty;
  return product > kHashRange ? kHashRange : product;
}

TickEligibility eligibility(const MinerAccount& miner, std::uint64_t slot_salt,
                            std::uint64_t tick, const LotteryParams& params,
                            LotteryMode mode) {
  TickEligibility out;
  out.miner_id = miner.id;
  out.tick = tick;
  out.proofhash = prf64(miner.seed, slot_salt, tick);
  out.eligible =
      out.proofhash < eligibility_threshold(miner, params.difficulty, mode);
  return out;
}

HashLottery::HashLottery(const Scenario& scenario, LotteryMode mode)
    : master_seed_(scenario.master_seed),
      tick_limit_(scenario.lottery ? scenario.lottery->tick_limit : 0) {
  if (!scenario.lottery) {
    throw Error(ErrorCode::kMissingLotteryParams,
                "hash lottery needs lottery parameters");
  }
  for (std::size_t i = 0; i < scenario.miners.size(); ++i) {
    const auto& miner = scenario.miners[i];
    const Threshold t =
        eligibility_threshold(miner, scenario.lottery->difficulty, mode);
    if (t > 0) entrants_.push_back(Entrant{i, miner.id, miner.seed, t});
  }
}

std::optional<HashLottery::Hit> HashLottery::resolve(std::uint64_t slot) const {
  if (entrants_.empty()) return std::nullopt;
  const std::uint64_t salt = slot_salt(master_seed_, slot);

  // At most a handful of miners in practice; keep prefixes on the stack.
  constexpr std::size_t kInline = 16;
  PrfPrefix inline_prefixes[kInline];
  std::vector<PrfPrefix> heap_prefixes;
  PrfPrefix* prefixes = inline_prefixes;
  if (entrants_.size() > kInline) {
    heap_prefixes.resize(entrants_.size());
    prefixes = heap_prefixes.data();
  }
  for (std::size_t e = 0; e < entrants_.size(); ++e) {
    prefixes[e] = prf64_prefix(entrants_[e].seed, salt);
  }

  for (std::uint64_t tick = 0; tick < tick_limit_; ++tick) {
    std::optional<Hit> best;
    for (std::size_t e = 0; e < entrants_.size(); ++e) {
      const std::uint64_t h = prefixes[e].finish(tick);
      if (h >= entrants_[e].threshold) continue;
      if (!best || h < best->hash ||
          (h == best->hash && entrants_[e].id < entrants_[best->entrant].id)) {
        best = Hit{e, tick, h};
      }
    }
    if (best) return best;
  }
  return std::nullopt;
}

SlotOutcome HashLottery::run_slot(std::uint64_t slot) const {
  SlotOutcome out;
  out.slot = slot;
  if (auto hit = resolve(slot)) {
    out.winner = entrants_[hit->entrant].id;
    out.winning_tick = hit->tick;
    out.winning_hash = hit->hash;
  }
  return out;
}

std::optional<std::size_t> HashLottery::winner_index(std::uint64_t slot) const {
  if (auto hit = resolve(slot)) return entrants_[hit->entrant].index;
  return std::nullopt;
}

SlotOutcome run_lottery_slot(const Scenario& scenario, std::uint64_t slot,
                             LotteryMode mode) {
  return HashLottery(scenario, mode).run_slot(slot);
}

std::uint64_t calibrate_difficulty(const Scenario& scenario, double target_rate,
                                   LotteryMode mode) {
  if (!(target_rate > 0.0 && target_rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidParameter,
                "target_rate must lie in (0, 1]");
  }
  std::vector<BigInt> weights;
  BigInt total = 0;
  for (const auto& miner : scenario.miners) {
    const unsigned __int128 w = miner_weight(miner, weighting_for(mode));
    BigInt big = static_cast<std::uint64_t>(w >> 64);
    big <<= 64;
    big += static_cast<std::uint64_t>(w);
    total += big;
    if (big > 0) weights.push_back(std::move(big));
  }
  if (total == 0) {
    throw Error(ErrorCode::kZeroTotalWeight, "sum of lottery weights is 0");
  }

  const BigInt range = BigInt(1) << 64;
  // target_rate is a binary double, so rate * 2^64 is an exact rational.
  const Rational budget = Rational(target_rate) * Rational(range);
  // For rate <= 1 the min(1, .) clamp can only bind once the unclamped sum
  // already exceeds the budget, except for a lone miner at rate 1; comparing
  // the unclamped sum keeps D = floor(2^64 / w) in that case.
  auto expected_hits_ok = [&](const BigInt& d) {
    BigInt sum = 0;
    for (const auto& w : weights) sum += d * w;
    return Rational(sum) <= budget;
  };

  BigInt lo = 1;
  BigInt hi = std::numeric_limits<std::uint64_t>::max();
  if (!expected_hits_ok(lo)) {
    throw Error(ErrorCode::kInvalidParameter,
                "target_rate is unreachable even at difficulty 1");
  }
  while (lo < hi) {
    BigInt mid = (lo + hi + 1) / 2;
    if (expected_hits_ok(mid)) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo.convert_to<std::uint64_t>();
}

}  // namespace poslab
