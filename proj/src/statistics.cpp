#include "poslab/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "poslab/error.hpp"

namespace poslab {

double chi_square_survival(double statistic, int df) {
  if (df < 1) {
    throw Error(ErrorCode::kInvalidParameter, "df must be >= 1");
  }
  if (std::isinf(statistic)) return 0.0;
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * statistic);
}

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> counts,
                               std::span<const Rational> expected_probs,
                               std::uint64_t n) {
  if (counts.size() != expected_probs.size()) {
    throw Error(ErrorCode::kInvalidParameter,
                "counts and probabilities differ in length");
  }
  std::uint64_t observed_total = 0;
  for (auto c : counts) observed_total += c;
  if (n == 0 || observed_total != n) {
    throw Error(ErrorCode::kInvalidParameter,
                "counts must be positive in total and sum to n");
  }
  Rational prob_total = 0;
  for (const auto& p : expected_probs) {
    if (p < 0) {
      throw Error(ErrorCode::kInvalidParameter, "negative probability");
    }
    prob_total += p;
  }
  if (prob_total != 1) {
    throw Error(ErrorCode::kInvalidParameter, "probabilities must sum to 1");
  }

  struct Category {
    double observed;
    double expected;
  };
  std::vector<Category> retained;
  Category residual{0.0, 0.0};
  bool has_residual = false;
  bool impossible = false;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected =
        to_double(expected_probs[i] * Rational(BigInt(n)));
    const double observed = static_cast<double>(counts[i]);
    if (expected_probs[i] == 0 && counts[i] > 0) impossible = true;
    if (expected >= kMinExpectedCount) {
      retained.push_back({observed, expected});
    } else {
      residual.observed += observed;
      residual.expected += expected;
      has_residual = true;
    }
  }
  if (has_residual) {
    if (residual.expected >= kMinExpectedCount || retained.empty()) {
      retained.push_back(residual);
    } else {
      auto smallest = std::min_element(
          retained.begin(), retained.end(),
          [](const Category& a, const Category& b) {
            return a.expected < b.expected;
          });
      smallest->observed += residual.observed;
      smallest->expected += residual.expected;
    }
  }

  if (impossible) {
    const int df = std::max<int>(1, static_cast<int>(retained.size()) - 1);
    return {std::numeric_limits<double>::infinity(), df, 0.0};
  }
  if (retained.size() < 2) {
    throw Error(ErrorCode::kDegenerateTest,
                "fewer than two categories after pooling");
  }

  ChiSquareResult out;
  out.statistic = 0.0;
  for (const auto& c : retained) {
    const double d = c.observed - c.expected;
    out.statistic += d * d / c.expected;
  }
  out.df = static_cast<int>(retained.size()) - 1;
  out.p_value = chi_square_survival(out.statistic, out.df);
  return out;
}

Interval binomial_ci99(std::uint64_t count, std::uint64_t n) {
  if (n == 0 || count > n) {
    throw Error(ErrorCode::kInvalidParameter, "need 0 <= count <= n, n >= 1");
  }
  // Each tail of the two-sided 99% Clopper-Pearson interval.
  constexpr double kTail = 0.005;
  const double nd = static_cast<double>(n);
  if (count == 0) return {0.0, 1.0 - std::pow(kTail, 1.0 / nd)};
  if (count == n) return {std::pow(kTail, 1.0 / nd), 1.0};
  const double p = static_cast<double>(count) / nd;
  const double half = kZ99 * std::sqrt(p * (1.0 - p) / nd);
  return {std::max(0.0, p - half), std::min(1.0, p + half)};
}

double gini_coefficient(std::span<const double> values) {
  if (values.empty()) return 0.0;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double total = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    total += sorted[i];
    weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * sorted[i];
  }
  if (total <= 0.0) return 0.0;
  return weighted / (n * total);
}

}  // namespace poslab
