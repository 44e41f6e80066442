#include "poslab/sortition.hpp"

#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "poslab/error.hpp"
#include "poslab/prf.hpp"
#include "support/oracles.hpp"

namespace poslab {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected poslab::Error";
  return ErrorCode::kIoError;
}

TEST(OuroborosSelect, Examples) {
  const std::vector<double> quarters{0.25, 0.25, 0.25, 0.25};
  EXPECT_EQ(ouroboros_select(quarters, 0.10), 0u);
  const std::vector<double> sixths{1.0 / 6, 1.0 / 3, 1.0 / 2};
  EXPECT_EQ(ouroboros_select(sixths, 0.49), 1u);
  EXPECT_EQ(ouroboros_select(sixths, 0.999), 2u);
}

TEST(OuroborosSelect, HalfOpenIntervals) {
  const std::vector<double> quarters{0.25, 0.25, 0.25, 0.25};
  EXPECT_EQ(ouroboros_select(quarters, 0.0), 0u);
  EXPECT_EQ(ouroboros_select(quarters, 0.25), 1u);
  EXPECT_EQ(ouroboros_select(quarters, 0.5), 2u);
  EXPECT_EQ(ouroboros_select(quarters, std::nextafter(0.75, 0.0)), 2u);
  EXPECT_EQ(ouroboros_select(quarters, std::nextafter(1.0, 0.0)), 3u);
}

TEST(OuroborosSelect, ZeroWeightNeverSelected) {
  const std::vector<double> w{0.0, 0.5, 0.0, 0.5, 0.0};
  for (int k = 0; k < 10'000; ++k) {
    const std::size_t i = ouroboros_select(w, unit_interval(prf64(1, k, 2)));
    EXPECT_TRUE(i == 1 || i == 3);
  }
  EXPECT_EQ(ouroboros_select(w, std::nextafter(1.0, 0.0)), 3u);
}

TEST(OuroborosSelect, MalformedWeights) {
  EXPECT_EQ(CodeOf([] { ouroboros_select(std::vector<double>{0.5, 0.4}, 0.1); }),
            ErrorCode::kMalformedWeights);
  EXPECT_EQ(CodeOf([] { ouroboros_select(std::vector<double>{1.5, -0.5}, 0.1); }),
            ErrorCode::kMalformedWeights);
  EXPECT_EQ(CodeOf([] { ouroboros_select(std::vector<double>{}, 0.1); }),
            ErrorCode::kMalformedWeights);
  // Within 2^-40 of 1 is accepted.
  EXPECT_NO_THROW(ouroboros_select(std::vector<double>{0.5, 0.5 - 0x1.0p-42}, 0.1));
}

// Preimage measures of draw -> index equal the weights; also invariant
// under scaling all stakes.
TEST(OuroborosSelectProperty, PartitionMeasuresAndScaleInvariance) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 200; ++round) {
    const std::size_t n = 1 + rng() % 8;
    std::vector<MinerAccount> miners;
    for (std::size_t i = 0; i < n; ++i) miners.push_back({i, rng() % 50, 1, 0});
    miners[0].stake += 1;
    auto scaled = miners;
    const std::uint64_t c = 1 + rng() % 97;
    for (auto& m : scaled) m.stake *= c;

    const auto w = normalize_stakes(miners, Weighting::kStakeOnly);
    const auto ws = normalize_stakes(scaled, Weighting::kStakeOnly);
    const auto measures = oracle::cdf_interval_measures(w);
    const auto exact = normalize_stakes_exact(miners, Weighting::kStakeOnly);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR((measures[i] - exact[i]).convert_to<double>(), 0.0, 1e-12);
    }
    for (int k = 0; k < 200; ++k) {
      const double draw = unit_interval(rng());
      EXPECT_EQ(ouroboros_select(w, draw), ouroboros_select(ws, draw));
    }
  }
}

TEST(SplitStake, Examples) {
  const MinerAccount m{3, 5, 1, 77};
  const auto set = split_stake(m, 1);
  EXPECT_EQ(set.owner_id, 3u);
  ASSERT_EQ(set.accounts.size(), 5u);
  std::set<std::uint64_t> seeds;
  std::uint64_t total = 0;
  for (std::size_t j = 0; j < set.accounts.size(); ++j) {
    EXPECT_EQ(set.accounts[j].stake, 1u);
    EXPECT_EQ(set.accounts[j].seed, prf64(77, j, 1));
    seeds.insert(set.accounts[j].seed);
    total += set.accounts[j].stake;
  }
  EXPECT_EQ(seeds.size(), 5u);
  EXPECT_EQ(total, 5u);

  EXPECT_TRUE(split_stake(MinerAccount{0, 0, 1, 1}, 1).accounts.empty());
  EXPECT_EQ(CodeOf([] { split_stake(MinerAccount{0, 6, 1, 1}, 4); }),
            ErrorCode::kIndivisibleStake);
  EXPECT_EQ(CodeOf([] { split_stake(MinerAccount{0, 6, 1, 1}, 0); }),
            ErrorCode::kInvalidParameter);
}

TEST(AlgorandSelect, SingleAccount) {
  const std::vector<Participant> p{{123, 1, 4}};
  for (std::uint64_t salt = 0; salt < 50; ++salt) {
    EXPECT_EQ(algorand_select(p, salt), 4u);
  }
}

// prf64(11, 33, 0) = 0x958b7218d9c5cfaf < prf64(22, 33, 0) = 0xbf3d057f7ad51024
// (Python reference).
TEST(AlgorandSelect, LowerHashWins) {
  const std::vector<Participant> p{{22, 1, 0}, {11, 1, 1}};
  ASSERT_EQ(prf64(11, 33, 0), 0x958B7218D9C5CFAFULL);
  ASSERT_EQ(prf64(22, 33, 0), 0xBF3D057F7AD51024ULL);
  EXPECT_EQ(algorand_select(p, 33), 1u);
}

TEST(AlgorandSelect, EmptyParticipants) {
  EXPECT_EQ(CodeOf([] { algorand_select(std::vector<Participant>{}, 1); }),
            ErrorCode::kEmptyParticipantSet);
  EXPECT_EQ(CodeOf([] { algorand_select(std::vector<Participant>{{1, 0, 0}}, 1); }),
            ErrorCode::kEmptyParticipantSet);
}

TEST(AlgorandSelect, DeterministicAndOrderIndependent) {
  std::vector<Participant> p;
  for (std::uint64_t k = 0; k < 40; ++k) p.push_back({prf64(9, k, 1), 1, k % 4});
  auto reversed = p;
  std::reverse(reversed.begin(), reversed.end());
  for (std::uint64_t salt = 0; salt < 500; ++salt) {
    EXPECT_EQ(algorand_select(p, salt), algorand_select(reversed, salt));
  }
}

TEST(AlgorandSelect, ThreeOfTenUnitAccountsWinThirtyPercent) {
  std::vector<MinerAccount> miners{{0, 3, 1, 501}, {1, 7, 1, 502}};
  const std::vector<std::uint64_t> units{1, 1};
  const auto participants = build_participants(miners, units);
  ASSERT_EQ(participants.size(), 10u);
  constexpr std::uint64_t kSlots = 1'000'000;
  std::uint64_t wins = 0;
  for (std::uint64_t slot = 0; slot < kSlots; ++slot) {
    wins += algorand_select(participants, slot_salt(8, slot)) == 0;
  }
  const double expected =
      oracle::sortition_account_share({3, 7}, 1)[0].convert_to<double>();
  EXPECT_DOUBLE_EQ(expected, 0.3);
  EXPECT_NEAR(static_cast<double>(wins) / kSlots, expected,
              3 * std::sqrt(0.3 * 0.7 / kSlots));
}

TEST(AlgorandSelect, WeightedAccountsFollowStake) {
  // One account per miner with unequal stakes.
  const std::vector<Participant> p{{1001, 30, 0}, {1002, 70, 1}};
  constexpr std::uint64_t kSlots = 400'000;
  std::uint64_t wins = 0;
  for (std::uint64_t slot = 0; slot < kSlots; ++slot) {
    wins += algorand_select(p, slot_salt(3, slot)) == 0;
  }
  EXPECT_NEAR(static_cast<double>(wins) / kSlots, 0.3,
              3 * std::sqrt(0.21 / kSlots));
}

TEST(BuildParticipants, CommonUnit) {
  std::vector<MinerAccount> miners{{0, 10, 1, 1}, {1, 20, 1, 2}, {2, 0, 1, 3},
                                   {3, 40, 1, 4}};
  EXPECT_EQ(common_stake_unit(miners), 10u);
  const std::vector<std::uint64_t> units(4, 10);
  const auto p = build_participants(miners, units);
  EXPECT_EQ(p.size(), 7u);
  for (const auto& x : p) EXPECT_NE(x.owner, 2u);
}

}  // namespace
}  // namespace poslab
