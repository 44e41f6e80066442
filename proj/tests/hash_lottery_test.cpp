#include "poslab/hash_lottery.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "poslab/error.hpp"
#include "support/oracles.hpp"

namespace poslab {
namespace {

// Golden vectors from an independent Python evaluation of the same
// definition; mix64(gamma) is the published SplitMix64 seed-0 output.
TEST(Prf64, GoldenVectors) {
  EXPECT_EQ(mix64(kGoldenGamma), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(prf64(0, 0, 0), 0xFBE988335F36C931ULL);
  EXPECT_EQ(prf64(1, 2, 3), 0x4822D3C4BC9FCFA9ULL);
  EXPECT_EQ(prf64(42, 7, 0), 0x7D473B97A05F05DEULL);
  const std::uint64_t max = ~0ULL;
  EXPECT_EQ(prf64(max, max, max), 0x179F01F0D2FBA97AULL);
}

TEST(Prf64, DeterministicAndPrefixConsistent) {
  EXPECT_EQ(prf64(9, 8, 7), prf64(9, 8, 7));
  const PrfPrefix prefix = prf64_prefix(9, 8);
  for (std::uint64_t c = 0; c < 100; ++c) {
    EXPECT_EQ(prefix.finish(c), prf64(9, 8, c));
  }
  static_assert(prf64(0, 0, 0) == 0xFBE988335F36C931ULL);
}

TEST(Prf64, MeanOfMillionCountersIsCentered) {
  constexpr int kN = 1'000'000;
  long double sum = 0;
  for (int c = 0; c < kN; ++c) sum += static_cast<long double>(prf64(123, 456, c));
  const double mean = static_cast<double>(sum / kN);
  const double tolerance = 3.0 * 0x1.0p64 / std::sqrt(12.0 * kN);
  EXPECT_NEAR(mean, 0x1.0p63, tolerance);
}

TEST(Prf64, BitsAreBalanced) {
  constexpr int kN = 200'000;
  std::array<int, 64> ones{};
  for (int c = 0; c < kN; ++c) {
    const std::uint64_t h = prf64(5, c % 7, c);
    for (int b = 0; b < 64; ++b) ones[b] += (h >> b) & 1;
  }
  const double sigma = std::sqrt(kN * 0.25);
  for (int b = 0; b < 64; ++b) EXPECT_NEAR(ones[b], kN / 2.0, 5 * sigma) << b;
}

TEST(Eligibility, SaturatedThresholdAcceptsEveryHash) {
  const MinerAccount miner{0, ~0ULL, 3, 11};
  const LotteryParams params{~0ULL, 10};
  EXPECT_EQ(eligibility_threshold(miner, params.difficulty, LotteryMode::kPeercoin),
            kHashRange);
  for (std::uint64_t t = 0; t < 200; ++t) {
    EXPECT_TRUE(eligibility(miner, 77, t, params, LotteryMode::kPeercoin).eligible);
    EXPECT_TRUE(eligibility(miner, 77, t, params, LotteryMode::kBlackcoinNxt).eligible);
  }
}

TEST(Eligibility, ZeroStakeNeverEligible) {
  const MinerAccount miner{0, 0, 5, 11};
  const LotteryParams params{~0ULL, 10};
  for (std::uint64_t t = 0; t < 200; ++t) {
    EXPECT_FALSE(eligibility(miner, 77, t, params, LotteryMode::kPeercoin).eligible);
  }
}

// seed 12345, salt = prf64(99, 0, 0), tick 7 evaluated in Python:
// salt = 0x6ff16b7cedd0a957, proofhash = 0x7ad49744ff974762.
TEST(Eligibility, PeercoinThresholdIsDifficultyTimesStakeTimesAge) {
  const MinerAccount miner{4, 5, 2, 12345};
  const std::uint64_t salt = slot_salt(99, 0);
  ASSERT_EQ(salt, 0x6FF16B7CEDD0A957ULL);
  const std::uint64_t hash = 0x7AD49744FF974762ULL;

  // 10 * D just above the hash: eligible. Exactly equal: not eligible.
  const std::uint64_t d_above = hash / 10 + 1;
  auto e = eligibility(miner, salt, 7, {d_above, 1}, LotteryMode::kPeercoin);
  EXPECT_EQ(e.proofhash, hash);
  EXPECT_EQ(e.miner_id, 4u);
  EXPECT_EQ(e.tick, 7u);
  EXPECT_TRUE(e.eligible);
  const std::uint64_t d_below = hash / 10;
  EXPECT_FALSE(eligibility(miner, salt, 7, {d_below, 1}, LotteryMode::kPeercoin).eligible);
  // BlackcoinNxt ignores age: threshold 5 * d_above < hash.
  EXPECT_FALSE(eligibility(miner, salt, 7, {d_above, 1}, LotteryMode::kBlackcoinNxt).eligible);
}

TEST(Eligibility, StrictComparisonAtEquality) {
  const std::uint64_t salt = 3;
  const MinerAccount probe{0, 1, 1, 999};
  const std::uint64_t hash = prf64(999, salt, 0);
  ASSERT_GT(hash, 0u);
  // Threshold = 1 * hash exactly.
  EXPECT_FALSE(eligibility(probe, salt, 0, {hash, 1}, LotteryMode::kBlackcoinNxt).eligible);
  EXPECT_TRUE(eligibility(probe, salt, 0, {hash + 1, 1}, LotteryMode::kBlackcoinNxt).eligible);
}

Scenario LotteryScenario(std::vector<std::uint64_t> stakes,
                         std::vector<std::uint64_t> ages, std::uint64_t difficulty,
                         std::uint64_t tick_limit = kDefaultTickLimit) {
  Scenario s;
  s.name = "lottery";
  s.mechanism = Mechanism::kBlackcoinNxt;
  s.master_seed = 2024;
  s.lottery = LotteryParams{difficulty, tick_limit};
  for (std::size_t i = 0; i < stakes.size(); ++i) {
    s.miners.push_back({i, stakes[i], ages.empty() ? 1 : ages[i],
                        default_miner_seed(s.master_seed, i)});
  }
  return s;
}

TEST(RunLotterySlot, SaturatedSingleMinerWinsAtTickZero) {
  const Scenario s = LotteryScenario({5}, {}, ~0ULL);
  for (std::uint64_t slot = 0; slot < 20; ++slot) {
    const SlotOutcome o = run_lottery_slot(s, slot, LotteryMode::kBlackcoinNxt);
    ASSERT_FALSE(o.empty());
    EXPECT_EQ(*o.winner, 0u);
    EXPECT_EQ(*o.winning_tick, 0u);
    EXPECT_EQ(*o.winning_hash, prf64(s.miners[0].seed, slot_salt(2024, slot), 0));
  }
}

TEST(RunLotterySlot, AllZeroStakeGivesEmptySlot) {
  Scenario s = LotteryScenario({0, 0}, {}, 1000);
  const SlotOutcome o = run_lottery_slot(s, 0, LotteryMode::kBlackcoinNxt);
  EXPECT_TRUE(o.empty());
  EXPECT_FALSE(o.winning_tick.has_value());
  EXPECT_FALSE(o.winning_hash.has_value());
}

TEST(RunLotterySlot, ExhaustedTickLimitGivesEmptySlot) {
  const Scenario s = LotteryScenario({1}, {}, 1, 3);
  int empty = 0;
  for (std::uint64_t slot = 0; slot < 100; ++slot) {
    empty += run_lottery_slot(s, slot, LotteryMode::kBlackcoinNxt).empty();
  }
  EXPECT_EQ(empty, 100);
}

// Replays the first-success rule tick by tick with the public eligibility().
TEST(RunLotterySlot, MatchesTickByTickReplay) {
  const Scenario s = LotteryScenario({3, 1, 4}, {2, 7, 1}, 1ULL << 59, 500);
  for (LotteryMode mode : {LotteryMode::kPeercoin, LotteryMode::kBlackcoinNxt}) {
    for (std::uint64_t slot = 0; slot < 300; ++slot) {
      const std::uint64_t salt = slot_salt(s.master_seed, slot);
      std::optional<TickEligibility> best;
      for (std::uint64_t t = 0; t < s.lottery->tick_limit && !best; ++t) {
        for (const auto& m : s.miners) {
          const auto e = eligibility(m, salt, t, *s.lottery, mode);
          if (e.eligible && (!best || e.proofhash < best->proofhash)) best = e;
        }
      }
      const SlotOutcome o = run_lottery_slot(s, slot, mode);
      ASSERT_EQ(o.empty(), !best.has_value());
      if (best) {
        EXPECT_EQ(*o.winner, best->miner_id);
        EXPECT_EQ(*o.winning_tick, best->tick);
        EXPECT_EQ(*o.winning_hash, best->proofhash);
      }
    }
  }
}

TEST(RunLotterySlot, ZeroWeightMinerNeverWins) {
  const Scenario s = LotteryScenario({0, 3, 2}, {9, 1, 0}, 1ULL << 58, 2000);
  for (std::uint64_t slot = 0; slot < 2000; ++slot) {
    const auto o = run_lottery_slot(s, slot, LotteryMode::kPeercoin);
    if (o.winner) EXPECT_EQ(*o.winner, 1u);
  }
}

TEST(RunLotterySlot, EqualStakesSplitEvenlyOverMillionSlots) {
  const Scenario s = LotteryScenario({1, 1}, {}, 0);
  Scenario calibrated = s;
  calibrated.lottery->difficulty =
      calibrate_difficulty(s, kDefaultTargetRate, LotteryMode::kBlackcoinNxt);
  const HashLottery lottery(calibrated, LotteryMode::kBlackcoinNxt);
  constexpr std::uint64_t kSlots = 1'000'000;
  std::uint64_t zero_wins = 0, decided = 0;
  for (std::uint64_t slot = 0; slot < kSlots; ++slot) {
    if (auto w = lottery.winner_index(slot)) {
      ++decided;
      zero_wins += *w == 0;
    }
  }
  EXPECT_EQ(decided, kSlots);
  const double freq = static_cast<double>(zero_wins) / decided;
  EXPECT_NEAR(freq, 0.5, 3 * std::sqrt(0.25 / kSlots));
}

// floor(r * 2^64 / (n * s)) evaluated with Python integers.
TEST(CalibrateDifficulty, ClosedFormForEqualStakes) {
  const Scenario four = LotteryScenario({25, 25, 25, 25}, {}, 1);
  EXPECT_EQ(calibrate_difficulty(four, 0.01, LotteryMode::kBlackcoinNxt),
            1844674407370955ULL);
  const Scenario three = LotteryScenario({7, 7, 7}, {}, 1);
  EXPECT_EQ(calibrate_difficulty(three, 0.01, LotteryMode::kBlackcoinNxt),
            8784163844623596ULL);
}

TEST(CalibrateDifficulty, SingleMinerFullRate) {
  EXPECT_EQ(calibrate_difficulty(LotteryScenario({3}, {}, 1), 1.0,
                                 LotteryMode::kBlackcoinNxt),
            6148914691236517205ULL);
  EXPECT_EQ(calibrate_difficulty(LotteryScenario({10}, {}, 1), 1.0,
                                 LotteryMode::kBlackcoinNxt),
            1844674407370955161ULL);
  // floor(2^64 / 1) does not fit; the search tops out at 2^64 - 1.
  EXPECT_EQ(calibrate_difficulty(LotteryScenario({1}, {}, 1), 1.0,
                                 LotteryMode::kBlackcoinNxt),
            ~0ULL);
}

TEST(CalibrateDifficulty, PeercoinUsesAgeWeights) {
  const Scenario s = LotteryScenario({5, 5}, {1, 3}, 1);
  const auto peer = calibrate_difficulty(s, 0.01, LotteryMode::kPeercoin);
  const auto black = calibrate_difficulty(s, 0.01, LotteryMode::kBlackcoinNxt);
  EXPECT_LT(peer, black);
  // sum of weights 20 versus 10.
  EXPECT_NEAR(static_cast<double>(black) / static_cast<double>(peer), 2.0, 1e-9);
}

TEST(CalibrateDifficulty, MonotoneInTargetRate) {
  const Scenario s = LotteryScenario({13, 2, 70}, {4, 1, 9}, 1);
  std::uint64_t previous = ~0ULL;
  for (double rate : {1.0, 0.5, 0.2, 0.05, 0.01, 0.003, 1e-4, 1e-7}) {
    const auto d = calibrate_difficulty(s, rate, LotteryMode::kPeercoin);
    EXPECT_LE(d, previous) << rate;
    previous = d;
    // D is the largest value meeting the budget.
    auto rate_at = [&](std::uint64_t diff) {
      long double sum = 0;
      for (const auto& m : s.miners) {
        sum += std::min<long double>(
            1.0L, static_cast<long double>(diff) * m.stake * m.coin_age / 0x1.0p64L);
      }
      return sum;
    };
    EXPECT_LE(rate_at(d), rate * (1 + 1e-12));
    EXPECT_GT(rate_at(d + 1), rate * (1 - 1e-12));
  }
}

TEST(CalibrateDifficulty, Errors) {
  const Scenario zero = LotteryScenario({0, 0}, {}, 1);
  try {
    calibrate_difficulty(zero, 0.01, LotteryMode::kBlackcoinNxt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroTotalWeight);
  }
  EXPECT_THROW(calibrate_difficulty(LotteryScenario({1}, {}, 1), 0.0,
                                    LotteryMode::kBlackcoinNxt),
               Error);
  EXPECT_THROW(calibrate_difficulty(LotteryScenario({1}, {}, 1), 1.5,
                                    LotteryMode::kBlackcoinNxt),
               Error);
}

// The first-success winner law computed by enumeration approaches the
// proportional column as eligibility becomes rare.
TEST(LotteryOracle, ApproachesProportionalInRareEventLimit) {
  const std::vector<std::uint64_t> stakes{1, 2, 3};
  double previous_gap = 1.0;
  for (double rate : {1e-2, 1e-3, 1e-4, 1e-5}) {
    const Scenario s = LotteryScenario(stakes, {}, 1);
    const auto d = calibrate_difficulty(s, rate, LotteryMode::kBlackcoinNxt);
    std::vector<oracle::BigInt> thresholds;
    for (auto st : stakes) thresholds.push_back(oracle::capped_threshold(d, st, 1));
    const auto dist = oracle::lottery_winner_oracle(thresholds);
    double gap = 0.0;
    for (std::size_t i = 0; i < stakes.size(); ++i) {
      gap = std::max(gap, std::abs(dist.winner[i].convert_to<double>() -
                                   static_cast<double>(stakes[i]) / 6.0));
    }
    EXPECT_LT(gap, previous_gap);
    previous_gap = gap;
  }
  EXPECT_LT(previous_gap, 1e-6);
}

TEST(LotteryOracle, MatchesPythonEnumeration) {
  // Same enumeration in Python Fractions: D = floor(0.01 * 2^64 / 6).
  std::vector<oracle::BigInt> thresholds;
  for (std::uint64_t st : {1, 2, 3}) {
    thresholds.push_back(oracle::capped_threshold(30744573456182586ULL, st, 1));
  }
  const auto dist = oracle::lottery_winner_oracle(thresholds);
  EXPECT_NEAR(dist.winner[0].convert_to<double>(), 0.16689854738648138, 1e-15);
  EXPECT_NEAR(dist.winner[1].convert_to<double>(), 0.3333796939979425, 1e-15);
  EXPECT_NEAR(dist.winner[2].convert_to<double>(), 0.4997217586155761, 1e-15);
  EXPECT_NEAR(dist.tick_success.convert_to<double>(), 0.009969472222222222, 1e-15);
}

}  // namespace
}  // namespace poslab
