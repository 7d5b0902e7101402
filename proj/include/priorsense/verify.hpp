#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "priorsense/model_space.hpp"
#include "priorsense/rng.hpp"

namespace priorsense {

/// Random space whose laws all have full support on a common grid of
/// `support_size` points in [0,1] (endpoints included when size >= 2).
ModelSpace random_model_space(Rng& rng, std::size_t n_models, std::size_t n_actions,
                              std::size_t support_size);

/// Random two-model Bernoulli space with parameters in [lo, hi].
ModelSpace random_bernoulli_pair(Rng& rng, std::size_t n_actions, double lo, double hi);

/// Random belief with every entry >= min_mass.
BeliefState random_belief(Rng& rng, std::size_t n, double min_mass);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct BatteryOptions {
  std::uint64_t seed = 7;
  unsigned workers = 0;
  /// Scales every Monte Carlo run count down; for smoke runs.
  bool quick = false;
};

/// Runs every diagnostic: martingale identity, smoothness sandwich,
/// closed-form bound checks, drift checks, oracle recursions and
/// monotonicity, hitting probabilities, embedding and regret bounds.
std::vector<CheckResult> run_verification_battery(const BatteryOptions& options);

void print_check_table(std::ostream& out, const std::vector<CheckResult>& results);
void write_check_csv(std::ostream& out, const std::vector<CheckResult>& results);

}  // namespace priorsense
