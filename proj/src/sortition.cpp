#include "poslab/sortition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "poslab/error.hpp"
#include "poslab/prf.hpp"

namespace poslab {

namespace {

constexpr double kWeightTolerance = 0x1.0p-40;

}  // namespace

StakeCdf::StakeCdf(std::span<const double> weights) {
  if (weights.empty()) {
    throw Error(ErrorCode::kMalformedWeights, "weight vector is empty");
  }
  upper_.reserve(weights.size());
  double running = 0.0;
  bool any_positive = false;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kMalformedWeights,
                  "weight " + std::to_string(i) + " is negative or not finite");
    }
    running += w;
    upper_.push_back(running);
    if (w > 0.0) {
      last_positive_ = i;
      any_positive = true;
    }
  }
  if (!any_positive || std::abs(running - 1.0) > kWeightTolerance) {
    throw Error(ErrorCode::kMalformedWeights,
                "weights sum to " + std::to_string(running) + ", expected 1");
  }
}

std::size_t StakeCdf::select(double draw) const {
  auto it = std::upper_bound(upper_.begin(), upper_.end(), draw);
  // Rounding can leave the total a hair under 1; the tail goes to the last
  // miner with positive weight.
  if (it == upper_.end()) return last_positive_;
  return static_cast<std::size_t>(it - upper_.begin());
}

std::size_t ouroboros_select(std::span<const double> weights, double draw) {
  return StakeCdf(weights).select(draw);
}

UnitAccountSet split_stake(const MinerAccount& miner, std::uint64_t unit) {
  if (unit == 0) {
    throw Error(ErrorCode::kInvalidParameter, "split unit must be >= 1");
  }
  if (miner.stake % unit != 0) {
    throw Error(ErrorCode::kIndivisibleStake,
                "stake " + std::to_string(miner.stake) +
                    " is not a multiple of " + std::to_string(unit));
  }
  UnitAccountSet out;
  out.owner_id = miner.id;
  const std::uint64_t count = miner.stake / unit;
  out.accounts.reserve(count);
  for (std::uint64_t j = 0; j < count; ++j) {
    out.accounts.push_back(
        UnitAccount{prf64(miner.seed, j, kSplitAccountCounter), unit});
  }
  return out;
}

std::size_t algorand_select(std::span<const Participant> participants,
                            std::uint64_t slot_salt) {
  const Participant* first = nullptr;
  bool uniform_stake = true;
  for (const auto& p : participants) {
    if (p.stake == 0) continue;
    if (!first) {
      first = &p;
    } else if (p.stake != first->stake) {
      uniform_stake = false;
    }
  }
  if (!first) {
    throw Error(ErrorCode::kEmptyParticipantSet, "no account holds stake");
  }

  if (uniform_stake) {
    const Participant* best = nullptr;
    std::uint64_t best_hash = 0;
    for (const auto& p : participants) {
      if (p.stake == 0) continue;
      const std::uint64_t h = prf64(p.account_seed, slot_salt, 0);
      if (!best || h < best_hash ||
          (h == best_hash && p.account_seed < best->account_seed)) {
        best = &p;
        best_hash = h;
      }
    }
    return best->owner;
  }

  const Participant* best = nullptr;
  double best_key = 0.0;
  for (const auto& p : participants) {
    if (p.stake == 0) continue;
    const std::uint64_t h = prf64(p.account_seed, slot_salt, 0);
    // Midpoint of the 2^-64 cell keeps u strictly inside (0, 1).
    const double u = (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
    const double key = -std::log1p(-u) / static_cast<double>(p.stake);
    if (!best || key < best_key ||
        (key == best_key && p.account_seed < best->account_seed)) {
      best = &p;
      best_key = key;
    }
  }
  return best->owner;
}

std::vector<Participant> build_participants(
    std::span<const MinerAccount> miners, std::span<const std::uint64_t> units) {
  if (units.size() != miners.size()) {
    throw Error(ErrorCode::kInvalidParameter,
                "need one split unit per miner");
  }
  std::vector<Participant> out;
  for (std::size_t i = 0; i < miners.size(); ++i) {
    if (miners[i].stake == 0) continue;
    for (const auto& account : split_stake(miners[i], units[i]).accounts) {
      out.push_back(Participant{account.seed, account.stake, i});
    }
  }
  return out;
}

std::uint64_t common_stake_unit(std::span<const MinerAccount> miners) {
  std::uint64_t g = 0;
  for (const auto& m : miners) g = std::gcd(g, m.stake);
  return g == 0 ? 1 : g;
}

}  // namespace poslab
