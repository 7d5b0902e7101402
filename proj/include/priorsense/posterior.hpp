#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "priorsense/belief.hpp"
#include "priorsense/model_space.hpp"

namespace priorsense {

/// Observation with zero likelihood under every model that carries mass.
class ImpossibleObservation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact Bayes-rule posterior after observing `reward` on `action`.
BeliefState bayes_update(const BeliefState& belief, std::size_t action, double reward,
                         const ModelSpace& space);

/// Same update addressed by outcome index; rewrites `mass` in place.
/// Hot path for the simulator.
void bayes_update_in_place(std::span<double> mass, std::size_t action, std::size_t outcome,
                           const ModelSpace& space);

/// Natural-log entropy; 0 log 0 = 0.
double entropy(const BeliefState& belief);
double entropy(std::span<const double> mass);

/// q(i): belief mass of the models whose optimal action is i.
std::vector<double> action_optimality_mass(const BeliefState& belief, const ModelSpace& space);
std::vector<double> action_optimality_mass(std::span<const double> mass, const ModelSpace& space);

}  // namespace priorsense
