#pragma once

#include <cstdint>
#include <span>

#include "poslab/stake_model.hpp"

namespace poslab {

inline constexpr double kGofSignificance = 0.01;
inline constexpr double kMinExpectedCount = 5.0;
inline constexpr double kZ99 = 2.576;

struct ChiSquareResult {
  double statistic = 0.0;
  int df = 1;
  double p_value = 1.0;
};

/// Pearson goodness of fit of `counts` against n * expected_probs.
/// Categories whose expected count is below 5 are pooled into one residual
/// category first. An observation in a zero-probability category yields an
/// infinite statistic and p-value 0.
/// Throws kDegenerateTest when fewer than two categories remain, and
/// kInvalidParameter when sum(counts) != n or the probabilities do not sum to 1.
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> counts,
                               std::span<const Rational> expected_probs,
                               std::uint64_t n);

/// P(X >= statistic) for X ~ chi-square(df).
double chi_square_survival(double statistic, int df);

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

/// 99% interval for a binomial proportion: normal approximation clamped to
/// [0, 1], exact Clopper-Pearson endpoint when count is 0 or n.
Interval binomial_ci99(std::uint64_t count, std::uint64_t n);

/// Sorted-cumulative Gini coefficient; 0 for an all-zero input.
double gini_coefficient(std::span<const double> values);

}  // namespace poslab
