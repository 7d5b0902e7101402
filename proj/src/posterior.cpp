#include "priorsense/posterior.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace priorsense {

BeliefState::BeliefState(std::vector<double> mass) : mass_(std::move(mass)) {
  if (mass_.empty()) throw std::invalid_argument("belief over an empty model set");
  double total = 0.0;
  for (double m : mass_) {
    if (!(m >= 0.0)) throw std::invalid_argument("belief entries must be non-negative");
    total += m;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw std::invalid_argument(fmt::format("belief sums to {:.17g}, not 1", total));
  }
}

BeliefState BeliefState::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("belief over an empty model set");
  return BeliefState(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

BeliefState BeliefState::point_mass(std::size_t n, std::size_t index) {
  if (index >= n) throw std::invalid_argument("point mass index out of range");
  std::vector<double> m(n, 0.0);
  m[index] = 1.0;
  return BeliefState(std::move(m));
}

BeliefState BeliefState::with_true_mass(std::size_t n, double p) {
  if (n < 2) throw std::invalid_argument("with_true_mass needs at least two models");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("mass outside [0,1]");
  std::vector<double> m(n, (1.0 - p) / static_cast<double>(n - 1));
  m[0] = p;
  return BeliefState(std::move(m));
}

void bayes_update_in_place(std::span<double> mass, std::size_t action, std::size_t outcome,
                           const ModelSpace& space) {
  double evidence = 0.0;
  for (std::size_t m = 0; m < mass.size(); ++m) {
    mass[m] *= space.likelihood_at(m, action, outcome);
    evidence += mass[m];
  }
  if (!(evidence > 0.0)) {
    throw ImpossibleObservation(fmt::format(
        "reward {} on action {} has zero likelihood under every model with positive mass",
        space.shared_support()[outcome], action));
  }
  for (double& m : mass) m /= evidence;
}

BeliefState bayes_update(const BeliefState& belief, std::size_t action, double reward,
                         const ModelSpace& space) {
  if (belief.size() != space.model_count()) {
    throw std::invalid_argument("belief length does not match the model count");
  }
  if (action >= space.action_count()) {
    throw std::invalid_argument(fmt::format("action {} out of range", action));
  }
  const std::size_t outcome = space.outcome_index(reward);
  std::vector<double> mass(belief.mass().begin(), belief.mass().end());
  bayes_update_in_place(mass, action, outcome, space);
  return BeliefState(std::move(mass));
}

double entropy(std::span<const double> mass) {
  double h = 0.0;
  for (double q : mass) {
    if (q > 0.0) h -= q * std::log(q);
  }
  return h;
}

double entropy(const BeliefState& belief) { return entropy(belief.mass()); }

std::vector<double> action_optimality_mass(std::span<const double> mass, const ModelSpace& space) {
  std::vector<double> q(space.action_count(), 0.0);
  for (std::size_t m = 0; m < mass.size(); ++m) q[space.optimal_action(m)] += mass[m];
  return q;
}

std::vector<double> action_optimality_mass(const BeliefState& belief, const ModelSpace& space) {
  if (belief.size() != space.model_count()) {
    throw std::invalid_argument("belief length does not match the model count");
  }
  return action_optimality_mass(belief.mass(), space);
}

}  // namespace priorsense
