#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace poslab {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline constexpr std::uint64_t kDefaultTickLimit = 10'000;
inline constexpr double kDefaultTargetRate = 0.01;

enum class Mechanism {
  kPeercoinAge,
  kBlackcoinNxt,
  kOuroboros,
  kAlgorand,
  kSaadModel,
  kProportionalModel,
};

inline constexpr Mechanism kAllMechanisms[] = {
    Mechanism::kPeercoinAge, Mechanism::kBlackcoinNxt,
    Mechanism::kOuroboros,   Mechanism::kAlgorand,
    Mechanism::kSaadModel,   Mechanism::kProportionalModel,
};

std::string_view to_string(Mechanism mechanism);
// Accepts the canonical names above ("PeercoinAge", "BlackcoinNxt", ...).
std::optional<Mechanism> parse_mechanism(std::string_view name);
bool is_hash_lottery(Mechanism mechanism);

enum class Weighting { kStakeOnly, kStakeTimesAge };

Weighting weighting_for(Mechanism mechanism);

struct MinerAccount {
  std::uint64_t id = 0;
  std::uint64_t stake = 0;
  std::uint64_t coin_age = 1;
  std::uint64_t seed = 0;

  friend bool operator==(const MinerAccount&, const MinerAccount&) = default;
};

struct LotteryParams {
  std::uint64_t difficulty = 1;
  std::uint64_t tick_limit = kDefaultTickLimit;

  friend bool operator==(const LotteryParams&, const LotteryParams&) = default;
};

struct Scenario {
  std::string name;
  std::vector<MinerAccount> miners;
  Mechanism mechanism = Mechanism::kProportionalModel;
  std::optional<LotteryParams> lottery;
  std::uint64_t master_seed = 0;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Checks every Scenario/MinerAccount/LotteryParams invariant and returns the
/// scenario unchanged. Throws Error with kDuplicateMinerId, kZeroTotalStake,
/// kMissingLotteryParams or kInvalidParameter.
Scenario validate_scenario(Scenario scenario);

/// s_i, or s_i * a_i; products of two 64-bit values never overflow 128 bits.
unsigned __int128 miner_weight(const MinerAccount& miner, Weighting weighting);

/// Floating-point normalized weights, w_i / sum(w). Throws kZeroTotalWeight.
std::vector<double> normalize_stakes(std::span<const MinerAccount> miners,
                                     Weighting weighting);

/// Exact counterpart of normalize_stakes.
std::vector<Rational> normalize_stakes_exact(
    std::span<const MinerAccount> miners, Weighting weighting);

/// Seed assigned to a miner whose scenario file omits one.
std::uint64_t default_miner_seed(std::uint64_t master_seed, std::uint64_t id);

std::optional<std::size_t> find_miner(const Scenario& scenario,
                                      std::uint64_t id);

double to_double(const Rational& value);

}  // namespace poslab
