#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "priorsense/belief.hpp"
#include "priorsense/rng.hpp"

namespace priorsense {

/// Finite discrete reward law on [0,1]. Support is strictly increasing.
class RewardDistribution {
 public:
  static constexpr double kSumTolerance = 1e-12;

  RewardDistribution() = default;
  RewardDistribution(std::vector<double> support, std::vector<double> probs);

  /// Two-point law on {0, 1} with P(1) = p.
  static RewardDistribution bernoulli(double p);

  std::span<const double> support() const noexcept { return support_; }
  std::span<const double> probs() const noexcept { return probs_; }
  double mean() const noexcept;

  /// Mass at `reward`; throws std::invalid_argument if it is not a support point.
  double mass_at(double reward) const;

  /// Same law re-expressed on `superset`, padding with zero mass.
  RewardDistribution on_support(std::span<const double> superset) const;

  friend bool operator==(const RewardDistribution&, const RewardDistribution&) = default;

 private:
  std::vector<double> support_;
  std::vector<double> probs_;
};

/// One candidate reward-generating mechanism: a law per action.
class Model {
 public:
  Model() = default;
  explicit Model(std::vector<RewardDistribution> per_action);

  std::size_t action_count() const noexcept { return per_action_.size(); }
  const RewardDistribution& action(std::size_t i) const { return per_action_.at(i); }
  const std::vector<RewardDistribution>& per_action() const noexcept { return per_action_; }
  std::span<const double> means() const noexcept { return means_; }

 private:
  std::vector<RewardDistribution> per_action_;
  std::vector<double> means_;
};

double action_mean(const Model& model, std::size_t action);
double likelihood(const Model& model, std::size_t action, double reward);
/// Lowest index attaining the maximal mean.
std::size_t optimal_action(const Model& model);

/// Finite model set sharing an action count. Every distribution is stored on
/// the union of all supports so outcomes can be addressed by index.
class ModelSpace {
 public:
  ModelSpace() = default;
  explicit ModelSpace(std::vector<Model> models);

  std::size_t model_count() const noexcept { return models_.size(); }
  std::size_t action_count() const noexcept { return action_count_; }
  std::size_t outcome_count() const noexcept { return support_.size(); }
  std::span<const double> shared_support() const noexcept { return support_; }

  const Model& model(std::size_t m) const { return models_.at(m); }
  const std::vector<Model>& models() const noexcept { return models_; }

  /// Outcome-probability row of (model, action) on the shared support.
  std::span<const double> outcome_probs(std::size_t m, std::size_t action) const noexcept {
    return {table_.data() + (m * action_count_ + action) * support_.size(), support_.size()};
  }
  double likelihood_at(std::size_t m, std::size_t action, std::size_t outcome) const noexcept {
    return table_[(m * action_count_ + action) * support_.size() + outcome];
  }
  double mean(std::size_t m, std::size_t action) const noexcept {
    return means_[m * action_count_ + action];
  }
  std::size_t optimal_action(std::size_t m) const noexcept { return best_[m]; }

  /// Index of `reward` in the shared support; throws std::invalid_argument.
  std::size_t outcome_index(double reward) const;

 private:
  std::vector<Model> models_;
  std::size_t action_count_ = 0;
  std::vector<double> support_;
  std::vector<double> table_;
  std::vector<double> means_;
  std::vector<std::size_t> best_;
};

/// Raised when a two-model space has a point where exactly one density vanishes.
class AssumptionViolated : public std::runtime_error {
 public:
  AssumptionViolated(std::size_t action, double support_point);
  std::size_t action() const noexcept { return action_; }
  double support_point() const noexcept { return point_; }

 private:
  std::size_t action_;
  double point_;
};

/// Largest pairwise likelihood ratio between the two models of `space`.
double smoothness_constant(const ModelSpace& space);

struct InstanceBundle {
  ModelSpace space;
  BeliefState prior;
  std::size_t true_model = 0;
  double delta = 0.0;
};

/// Checks the bundle invariants; throws std::invalid_argument.
void validate(const InstanceBundle& bundle);

// Lower-bound instances with the gap tied to (p, T).
InstanceBundle make_poor_prior_instance(double p, std::int64_t horizon);
InstanceBundle make_good_prior_instance(double p, std::int64_t horizon);

// Same structures with an explicit gap.
InstanceBundle poor_prior_instance_with_gap(double p, double delta);
InstanceBundle good_prior_instance_with_gap(double p, double delta);

enum class PriorCase { Poor, Good };

/// N-model scaling instance. Model 0 is the truth and prefers action 0 by
/// `delta`; every other model prefers action 1. For N > 2 each alternative
/// draws its own gap uniformly from [delta/2, 3 delta/2]. The returned prior
/// is uniform; callers replace it.
InstanceBundle make_scaling_instance(std::size_t n_models, double delta, PriorCase which,
                                     Rng& rng);

}  // namespace priorsense
