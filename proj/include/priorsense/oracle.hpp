#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "priorsense/model_space.hpp"

namespace priorsense {

inline constexpr std::int64_t kDefaultOracleCap = 12;

/// Observation counts n[action][outcome] of a 2x2 Bernoulli episode. They
/// determine the posterior, so they key the DP memo table.
struct SufficientStats {
  std::array<std::array<std::uint16_t, 2>, 2> counts{};

  std::int64_t total() const noexcept {
    return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
  }
};

/// Exact expected cumulative regret of Thompson Sampling started from prior
/// (alpha, 1 - alpha) on a 2-model 2-action Bernoulli instance, under the
/// bundle's true model. Memoized over SufficientStats; O(T^4) states.
double exact_ts_regret(const InstanceBundle& bundle, double alpha, std::int64_t horizon,
                       std::int64_t cap = kDefaultOracleCap);

/// As exact_ts_regret, but the first action is forced to `first_action`.
double exact_forced_regret(const InstanceBundle& bundle, double alpha, std::int64_t horizon,
                           std::size_t first_action, std::int64_t cap = kDefaultOracleCap);

/// Plain tree recursion over sequential Bayes updates, no memoization.
/// Exponential in T; used to cross-check the memoized recursion.
double exact_ts_regret_tree(const InstanceBundle& bundle, double alpha, std::int64_t horizon);

struct MonotonicityReport {
  std::vector<double> alphas;
  std::vector<double> regrets;
  /// Largest R(alpha_{j+1}) - R(alpha_j) along the grid (<= 0 when decreasing).
  double worst_increase = 0.0;
  bool nonincreasing = true;
};

/// Checks that the exact regret does not increase along an increasing grid of
/// prior masses, within 1e-9.
MonotonicityReport monotonicity_report(const InstanceBundle& bundle, std::int64_t horizon,
                                       const std::vector<double>& alpha_grid,
                                       std::int64_t cap = kDefaultOracleCap);

}  // namespace priorsense
