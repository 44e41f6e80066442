#include "poslab/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <thread>
#include <variant>

#include "poslab/error.hpp"
#include "poslab/hash_lottery.hpp"
#include "poslab/prf.hpp"
#include "poslab/probability_models.hpp"
#include "poslab/sortition.hpp"

namespace poslab {

unsigned worker_count() {
  if (const char* env = std::getenv("POS_LAB_THREADS"); env && *env) {
    unsigned value = 0;
    const char* end = env + std::strlen(env);
    auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec != std::errc() || ptr != end || value == 0) {
      throw Error(ErrorCode::kInvalidParameter,
                  std::string("POS_LAB_THREADS must be a positive integer, got '") +
                      env + "'");
    }
    return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct LotterySampler {
  HashLottery lottery;

  std::optional<std::size_t> operator()(std::uint64_t slot) const {
    return lottery.winner_index(slot);
  }
};

// Inverse-CDF draw from counter `counter` of the slot stream.
struct CdfSampler {
  StakeCdf cdf;
  std::uint64_t master_seed;
  std::uint64_t counter;

  std::optional<std::size_t> operator()(std::uint64_t slot) const {
    return cdf.select(unit_interval(prf64(master_seed, slot, counter)));
  }
};

struct AlgorandSampler {
  std::vector<Participant> participants;
  std::uint64_t master_seed;

  std::optional<std::size_t> operator()(std::uint64_t slot) const {
    return algorand_select(participants, slot_salt(master_seed, slot));
  }
};

struct FixedSampler {
  std::size_t winner;

  std::optional<std::size_t> operator()(std::uint64_t) const { return winner; }
};

using Sampler =
    std::variant<LotterySampler, CdfSampler, AlgorandSampler, FixedSampler>;

std::optional<std::size_t> preferred_index(const Scenario& scenario,
                                           const ExperimentOptions& options) {
  if (!options.saad_preferred_id) return std::nullopt;
  return find_miner(scenario, *options.saad_preferred_id);
}

Sampler make_sampler(const Scenario& scenario,
                     const ExperimentOptions& options) {
  switch (scenario.mechanism) {
    case Mechanism::kPeercoinAge:
    case Mechanism::kBlackcoinNxt:
      return LotterySampler{
          HashLottery(scenario, lottery_mode_for(scenario.mechanism))};
    case Mechanism::kOuroboros:
      return CdfSampler{
          StakeCdf(normalize_stakes(scenario.miners, Weighting::kStakeOnly)),
          scenario.master_seed, kOuroborosDrawCounter};
    case Mechanism::kAlgorand: {
      std::vector<std::uint64_t> units = options.split_units;
      if (units.empty()) {
        units.assign(scenario.miners.size(),
                     common_stake_unit(scenario.miners));
      }
      return AlgorandSampler{build_participants(scenario.miners, units),
                             scenario.master_seed};
    }
    case Mechanism::kSaadModel:
      if (auto major =
              saad_majority_miner(scenario, preferred_index(scenario, options))) {
        return FixedSampler{*major};
      }
      [[fallthrough]];
    case Mechanism::kProportionalModel:
      return CdfSampler{
          StakeCdf(normalize_stakes(scenario.miners, Weighting::kStakeOnly)),
          scenario.master_seed, kProportionalDrawCounter};
  }
  throw Error(ErrorCode::kInvalidParameter, "unknown mechanism");
}

void tally_range(const Sampler& sampler, std::uint64_t begin,
                 std::uint64_t end, std::vector<std::uint64_t>& counts) {
  std::visit(
      [&](const auto& s) {
        const std::size_t empty = counts.size() - 1;
        for (std::uint64_t slot = begin; slot < end; ++slot) {
          const auto winner = s(slot);
          ++counts[winner ? *winner : empty];
        }
      },
      sampler);
}

}  // namespace

std::vector<std::uint64_t> tally_slots(const Scenario& input,
                                       std::uint64_t trials,
                                       const ExperimentOptions& options) {
  const Scenario scenario = validate_scenario(input);
  if (trials == 0) {
    throw Error(ErrorCode::kInvalidParameter, "trials must be >= 1");
  }
  const Sampler sampler = make_sampler(scenario, options);
  const std::size_t width = scenario.miners.size() + 1;

  std::uint64_t workers = options.workers ? options.workers : worker_count();
  workers = std::clamp<std::uint64_t>(workers, 1, trials);

  std::vector<std::vector<std::uint64_t>> partial(
      workers, std::vector<std::uint64_t>(width, 0));
  if (workers == 1) {
    tally_range(sampler, 0, trials, partial[0]);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) {
      const std::uint64_t begin = trials / workers * w + std::min(w, trials % workers);
      const std::uint64_t end =
          begin + trials / workers + (w < trials % workers ? 1 : 0);
      pool.emplace_back([&, w, begin, end] {
        tally_range(sampler, begin, end, partial[w]);
      });
    }
  }

  std::vector<std::uint64_t> counts(width, 0);
  for (const auto& p : partial) {
    for (std::size_t i = 0; i < width; ++i) counts[i] += p[i];
  }
  return counts;
}

EmpiricalResult run_experiment(const Scenario& input, std::uint64_t trials,
                               const ExperimentOptions& options) {
  const Scenario scenario = validate_scenario(input);
  std::vector<std::uint64_t> tallies = tally_slots(scenario, trials, options);

  EmpiricalResult result;
  result.scenario_name = scenario.name;
  result.mechanism = scenario.mechanism;
  result.master_seed = scenario.master_seed;
  result.trials = trials;
  result.empty_slots = tallies.back();
  result.miners = scenario.miners;
  tallies.pop_back();

  const std::uint64_t decided = result.decided_slots();
  for (std::size_t i = 0; i < scenario.miners.size(); ++i) {
    result.wins.push_back({scenario.miners[i].id, tallies[i]});
    result.frequencies.push_back(
        decided ? static_cast<double>(tallies[i]) / static_cast<double>(decided)
                : 0.0);
    result.ci99.push_back(decided ? binomial_ci99(tallies[i], decided)
                                  : Interval{0.0, 1.0});
  }
  for (const auto& p : theoretical_selection_probabilities(scenario)) {
    result.theoretical.push_back(to_double(p));
  }

  if (decided == 0) {
    // Nothing to test against.
    result.chi_square = 0.0;
    result.chi_square_df = 1;
    result.p_value = 0.0;
    result.gof_pass = false;
    return result;
  }

  const auto model = simulated_selection_probabilities(
      scenario, preferred_index(scenario, options));
  try {
    const ChiSquareResult gof = chi_square_gof(tallies, model, decided);
    result.chi_square = gof.statistic;
    result.chi_square_df = gof.df;
    result.p_value = gof.p_value;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateTest) throw;
    // A single category carries all expected mass; the fit is exact unless a
    // zero-probability miner won (chi_square_gof reports that case itself).
    result.chi_square = 0.0;
    result.chi_square_df = 1;
    result.p_value = 1.0;
  }
  result.gof_pass = result.p_value >= kGofSignificance;
  return result;
}

AttackReport attacker_dominance(const Scenario& input, std::uint64_t attacker_id,
                                std::uint64_t trials,
                                const ExperimentOptions& options) {
  const Scenario scenario = validate_scenario(input);
  const auto index = find_miner(scenario, attacker_id);
  if (!index) {
    throw Error(ErrorCode::kUnknownAttackerId,
                "no miner with id " + std::to_string(attacker_id));
  }

  ExperimentOptions opts = options;
  opts.saad_preferred_id = attacker_id;

  Scenario saad = scenario;
  saad.mechanism = Mechanism::kSaadModel;
  const EmpiricalResult under_eq1 = run_experiment(saad, trials, opts);
  const EmpiricalResult under_mechanism = run_experiment(scenario, trials, opts);

  AttackReport report;
  report.attacker_id = attacker_id;
  report.stake_ratio = static_cast<double>(scenario.miners[*index].stake) /
                       static_cast<double>(total_stake(scenario));
  report.dominance_eq1 = under_eq1.frequencies[*index];
  report.dominance_mechanism = under_mechanism.frequencies[*index];
  report.mechanism = scenario.mechanism;
  report.trials = trials;
  return report;
}

FairnessReport fairness_report(const EmpiricalResult& result) {
  const std::uint64_t decided = result.decided_slots();
  if (decided == 0) {
    throw Error(ErrorCode::kInvalidParameter,
                "fairness needs at least one decided slot");
  }
  FairnessReport out;
  for (std::size_t i = 0; i < result.frequencies.size(); ++i) {
    out.max_abs_deviation = std::max(
        out.max_abs_deviation,
        std::abs(result.frequencies[i] - result.theoretical[i]));
  }

  std::vector<double> stakes;
  std::vector<double> wins;
  std::vector<std::uint64_t> counts;
  for (const auto& m : result.miners) stakes.push_back(static_cast<double>(m.stake));
  for (const auto& w : result.wins) {
    wins.push_back(static_cast<double>(w.count));
    counts.push_back(w.count);
  }
  out.gini_stake = gini_coefficient(stakes);
  out.gini_wins = gini_coefficient(wins);

  // Smallest coalition holding a strict majority of decided slots.
  std::sort(counts.begin(), counts.end(), std::greater<>());
  unsigned __int128 cumulative = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    cumulative += counts[k];
    if (2 * cumulative > decided) {
      out.nakamoto_coefficient = static_cast<int>(k + 1);
      break;
    }
  }
  return out;
}

}  // namespace poslab
