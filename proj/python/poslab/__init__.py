"""Proof-of-stake leader election simulator."""

from fractions import Fraction

from ._poslab import (
    AttackReport,
    ChiSquareResult,
    EmpiricalResult,
    FairnessReport,
    Interval,
    LotteryParams,
    Mechanism,
    MinerAccount,
    PosLabError,
    Scenario,
    attacker_dominance,
    binomial_ci99,
    calibrate_difficulty,
    chi_square_survival,
    default_miner_seed,
    fairness_report,
    gini_coefficient,
    load_scenario,
    main,
    normalize_stakes,
    parse_scenario,
    prf64,
    run_experiment,
)
from . import _poslab

__all__ = [
    "AttackReport", "ChiSquareResult", "EmpiricalResult", "FairnessReport",
    "Interval", "LotteryParams", "Mechanism", "MinerAccount", "PosLabError",
    "Scenario", "attacker_dominance", "binomial_ci99", "calibrate_difficulty",
    "chi_square_gof", "chi_square_survival", "default_miner_seed",
    "fairness_report", "gini_coefficient", "load_scenario", "main",
    "normalize_stakes", "parse_scenario", "prf64",
    "proportional_next_block_probability", "run_experiment",
    "saad_next_block_probability", "theoretical_selection_probabilities",
]


def _frac(parts):
    return Fraction(int(parts[0]), int(parts[1]))


def saad_next_block_probability(alpha, beta):
    return _frac(_poslab._saad_next_block_probability(alpha, beta))


def proportional_next_block_probability(alpha, beta):
    return _frac(_poslab._proportional_next_block_probability(alpha, beta))


def theoretical_selection_probabilities(scenario):
    return [_frac(p) for p in _poslab._theoretical_selection_probabilities(scenario)]


def chi_square_gof(counts, expected_probs, n):
    # floats are taken at their exact binary value
    probs = []
    for p in expected_probs:
        f = Fraction(p)
        probs.append((str(f.numerator), str(f.denominator)))
    return _poslab._chi_square_gof(list(counts), probs, n)
