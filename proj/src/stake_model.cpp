#include "poslab/stake_model.hpp"

#include <algorithm>
#include <unordered_set>

#include "poslab/error.hpp"
#include "poslab/prf.hpp"

namespace poslab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDuplicateMinerId: return "DuplicateMinerId";
    case ErrorCode::kZeroTotalStake: return "ZeroTotalStake";
    case ErrorCode::kMissingLotteryParams: return "MissingLotteryParams";
    case ErrorCode::kInvalidParameter: return "InvalidParameter";
    case ErrorCode::kZeroTotalWeight: return "ZeroTotalWeight";
    case ErrorCode::kMalformedWeights: return "MalformedWeights";
    case ErrorCode::kEmptyParticipantSet: return "EmptyParticipantSet";
    case ErrorCode::kIndivisibleStake: return "IndivisibleStake";
    case ErrorCode::kDegenerateTest: return "DegenerateTest";
    case ErrorCode::kUnknownAttackerId: return "UnknownAttackerId";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::kPeercoinAge: return "PeercoinAge";
    case Mechanism::kBlackcoinNxt: return "BlackcoinNxt";
    case Mechanism::kOuroboros: return "Ouroboros";
    case Mechanism::kAlgorand: return "Algorand";
    case Mechanism::kSaadModel: return "SaadModel";
    case Mechanism::kProportionalModel: return "ProportionalModel";
  }
  return "Unknown";
}

std::optional<Mechanism> parse_mechanism(std::string_view name) {
  for (Mechanism m : kAllMechanisms) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

bool is_hash_lottery(Mechanism mechanism) {
  return mechanism == Mechanism::kPeercoinAge ||
         mechanism == Mechanism::kBlackcoinNxt;
}

Weighting weighting_for(Mechanism mechanism) {
  return mechanism == Mechanism::kPeercoinAge ? Weighting::kStakeTimesAge
                                              : Weighting::kStakeOnly;
}

Scenario validate_scenario(Scenario scenario) {
  if (scenario.miners.empty()) {
    throw Error(ErrorCode::kZeroTotalStake,
                "scenario '" + scenario.name + "' has no miners");
  }
  std::unordered_set<std::uint64_t> ids;
  bool any_stake = false;
  for (const auto& miner : scenario.miners) {
    if (!ids.insert(miner.id).second) {
      throw Error(ErrorCode::kDuplicateMinerId,
                  "miner id " + std::to_string(miner.id) +
                      " appears more than once");
    }
    any_stake = any_stake || miner.stake > 0;
  }
  if (!any_stake) {
    throw Error(ErrorCode::kZeroTotalStake,
                "total stake of scenario '" + scenario.name + "' is 0");
  }
  if (is_hash_lottery(scenario.mechanism)) {
    if (!scenario.lottery) {
      throw Error(ErrorCode::kMissingLotteryParams,
                  std::string(to_string(scenario.mechanism)) +
                      " requires lottery parameters");
    }
  }
  if (scenario.lottery) {
    if (scenario.lottery->difficulty == 0) {
      throw Error(ErrorCode::kInvalidParameter, "lottery.difficulty must be > 0");
    }
    if (scenario.lottery->tick_limit == 0) {
      throw Error(ErrorCode::kInvalidParameter, "lottery.tick_limit must be >= 1");
    }
  }
  return scenario;
}

unsigned __int128 miner_weight(const MinerAccount& miner, Weighting weighting) {
  const auto stake = static_cast<unsigned __int128>(miner.stake);
  return weighting == Weighting::kStakeTimesAge ? stake * miner.coin_age : stake;
}

namespace {

BigInt to_bigint(unsigned __int128 v) {
  BigInt out = static_cast<std::uint64_t>(v >> 64);
  out <<= 64;
  out += static_cast<std::uint64_t>(v);
  return out;
}

}  // namespace

std::vector<double> normalize_stakes(std::span<const MinerAccount> miners,
                                     Weighting weighting) {
  std::vector<long double> weights;
  weights.reserve(miners.size());
  long double total = 0;
  for (const auto& miner : miners) {
    weights.push_back(static_cast<long double>(miner_weight(miner, weighting)));
    total += weights.back();
  }
  if (total <= 0) {
    throw Error(ErrorCode::kZeroTotalWeight, "sum of weights is 0");
  }
  std::vector<double> out;
  out.reserve(weights.size());
  for (long double w : weights) out.push_back(static_cast<double>(w / total));
  return out;
}

std::vector<Rational> normalize_stakes_exact(
    std::span<const MinerAccount> miners, Weighting weighting) {
  std::vector<BigInt> weights;
  weights.reserve(miners.size());
  BigInt total = 0;
  for (const auto& miner : miners) {
    weights.push_back(to_bigint(miner_weight(miner, weighting)));
    total += weights.back();
  }
  if (total == 0) {
    throw Error(ErrorCode::kZeroTotalWeight, "sum of weights is 0");
  }
  std::vector<Rational> out;
  out.reserve(weights.size());
  for (const auto& w : weights) out.emplace_back(w, total);
  return out;
}

std::uint64_t default_miner_seed(std::uint64_t master_seed, std::uint64_t id) {
  return prf64(master_seed, id, kMinerSeedCounter);
}

std::optional<std::size_t> find_miner(const Scenario& scenario,
                                      std::uint64_t id) {
  auto it = std::find_if(scenario.miners.begin(), scenario.miners.end(),
                         [id](const MinerAccount& m) { return m.id == id; });
  if (it == scenario.miners.end()) return std::nullopt;
  return static_cast<std::size_t>(it - scenario.miners.begin());
}

double to_double(const Rational& value) {
  return value.convert_to<double>();
}

}  // namespace poslab
