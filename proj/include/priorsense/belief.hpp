#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace priorsense {

/// Probability vector over the models of a space. Used both as the prior and
/// as the running posterior.
class BeliefState {
 public:
  static constexpr double kSumTolerance = 1e-12;

  BeliefState() = default;

  /// Throws std::invalid_argument unless entries are >= 0 and sum to 1.
  explicit BeliefState(std::vector<double> mass);

  /// Uniform belief over `n` models.
  static BeliefState uniform(std::size_t n);
  /// All mass on `index`.
  static BeliefState point_mass(std::size_t n, std::size_t index);
  /// Mass `p` on model 0, rest spread evenly over the other n-1 models.
  static BeliefState with_true_mass(std::size_t n, double p);

  std::size_t size() const noexcept { return mass_.size(); }
  double operator[](std::size_t i) const { return mass_[i]; }
  std::span<const double> mass() const noexcept { return mass_; }

  friend bool operator==(const BeliefState&, const BeliefState&) = default;

 private:
  std::vector<double> mass_;
};

}  // namespace priorsense
