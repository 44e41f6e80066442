#include "poslab/probability_models.hpp"

#include <limits>
#include <string>

#include "poslab/error.hpp"

namespace poslab {

StakeQuery::StakeQuery(std::uint64_t alpha, std::uint64_t beta)
    : alpha_(alpha), beta_(beta) {
  if (beta == 0) {
    throw Error(ErrorCode::kInvalidParameter, "beta must be > 0");
  }
  if (alpha > beta) {
    throw Error(ErrorCode::kInvalidParameter,
                "alpha " + std::to_string(alpha) + " exceeds beta " +
                    std::to_string(beta));
  }
}

bool StakeQuery::is_majority() const {
  return 2 * static_cast<unsigned __int128>(alpha_) >= beta_;
}

Rational saad_next_block_probability(const StakeQuery& q) {
  if (q.is_majority()) return Rational(1);
  return Rational(BigInt(q.alpha()), BigInt(q.beta()));
}

Rational proportional_next_block_probability(const StakeQuery& q) {
  return Rational(BigInt(q.alpha()), BigInt(q.beta()));
}

std::uint64_t total_stake(const Scenario& scenario) {
  unsigned __int128 total = 0;
  for (const auto& m : scenario.miners) total += m.stake;
  if (total > std::numeric_limits<std::uint64_t>::max()) {
    throw Error(ErrorCode::kInvalidParameter,
                "total stake does not fit in 64 bits");
  }
  return static_cast<std::uint64_t>(total);
}

std::vector<Rational> theoretical_selection_probabilities(
    const Scenario& scenario) {
  if (scenario.mechanism != Mechanism::kSaadModel) {
    return normalize_stakes_exact(scenario.miners,
                                  weighting_for(scenario.mechanism));
  }
  const std::uint64_t beta = total_stake(scenario);
  if (beta == 0) {
    throw Error(ErrorCode::kZeroTotalWeight, "total stake is 0");
  }
  std::vector<Rational> out;
  out.reserve(scenario.miners.size());
  for (const auto& m : scenario.miners) {
    out.push_back(saad_next_block_probability(StakeQuery(m.stake, beta)));
  }
  return out;
}

std::optional<std::size_t> saad_majority_miner(
    const Scenario& scenario, std::optional<std::size_t> preferred) {
  const std::uint64_t beta = total_stake(scenario);
  if (beta == 0) return std::nullopt;
  if (preferred && *preferred < scenario.miners.size() &&
      StakeQuery(scenario.miners[*preferred].stake, beta).is_majority()) {
    return preferred;
  }
  for (std::size_t i = 0; i < scenario.miners.size(); ++i) {
    if (StakeQuery(scenario.miners[i].stake, beta).is_majority()) return i;
  }
  return std::nullopt;
}

std::vector<Rational> simulated_selection_probabilities(
    const Scenario& scenario, std::optional<std::size_t> preferred) {
  if (scenario.mechanism == Mechanism::kSaadModel) {
    if (auto major = saad_majority_miner(scenario, preferred)) {
      std::vector<Rational> out(scenario.miners.size(), Rational(0));
      out[*major] = 1;
      return out;
    }
  }
  return theoretical_selection_probabilities(scenario);
}

}  // namespace poslab
