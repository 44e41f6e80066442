#pragma once

// Monte Carlo engine: evaluates many independent election slots of one
// scenario and compares the observed winners with the closed-form models.
//
// Slot j draws all of its randomness from prf64(master_seed, j, k), so the
// tallies depend only on (scenario, trials) and never on how slots are split
// across workers.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "poslab/stake_model.hpp"
#include "poslab/statistics.hpp"

namespace poslab {

struct ExperimentOptions {
  // 0 selects worker_count().
  unsigned workers = 0;
  // Algorand split unit per miner; empty means gcd of all stakes for everyone.
  std::vector<std::uint64_t> split_units;
  // Miner id the SaadModel elects when several qualify as majority stakers.
  std::optional<std::uint64_t> saad_preferred_id;
};

/// POS_LAB_THREADS if set (positive integer), else hardware concurrency.
/// Throws kInvalidParameter for a malformed value.
unsigned worker_count();

struct WinCount {
  std::uint64_t miner_id = 0;
  std::uint64_t count = 0;

  friend bool operator==(const WinCount&, const WinCount&) = default;
};

struct EmpiricalResult {
  std::string scenario_name;
  Mechanism mechanism = Mechanism::kProportionalModel;
  std::uint64_t master_seed = 0;
  std::uint64_t trials = 0;
  std::uint64_t empty_slots = 0;
  std::vector<MinerAccount> miners;
  std::vector<WinCount> wins;
  std::vector<double> frequencies;  // count / non-empty slots
  std::vector<double> theoretical;
  std::vector<Interval> ci99;
  double chi_square = 0.0;
  int chi_square_df = 1;
  double p_value = 1.0;
  bool gof_pass = false;

  std::uint64_t decided_slots() const { return trials - empty_slots; }
};

/// Raw tallies: one count per miner followed by the number of empty slots.
std::vector<std::uint64_t> tally_slots(const Scenario& scenario,
                                       std::uint64_t trials,
                                       const ExperimentOptions& options = {});

EmpiricalResult run_experiment(const Scenario& scenario, std::uint64_t trials,
                               const ExperimentOptions& options = {});

struct AttackReport {
  std::uint64_t attacker_id = 0;
  double stake_ratio = 0.0;
  double dominance_eq1 = 0.0;        // attacker win share under SaadModel
  double dominance_mechanism = 0.0;  // ... under the scenario's mechanism
  Mechanism mechanism = Mechanism::kProportionalModel;
  std::uint64_t trials = 0;
};

/// Runs the scenario under SaadModel and under its own mechanism and reports
/// the attacker's win share in each. Throws kUnknownAttackerId.
AttackReport attacker_dominance(const Scenario& scenario,
                                std::uint64_t attacker_id, std::uint64_t trials,
                                const ExperimentOptions& options = {});

struct FairnessReport {
  double max_abs_deviation = 0.0;
  double gini_stake = 0.0;
  double gini_wins = 0.0;
  int nakamoto_coefficient = 0;
};

FairnessReport fairness_report(const EmpiricalResult& result);

}  // namespace poslab
