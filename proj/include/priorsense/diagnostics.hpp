#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "priorsense/belief.hpp"
#include "priorsense/model_space.hpp"

namespace priorsense {

inline constexpr double kIdentityTolerance = 1e-12;
inline constexpr double kInequalityTolerance = 1e-10;

/// p/s <= next <= p*s, relative tolerance 1e-12 plus the smallest normal
/// double as absolute slack (subnormal masses carry no relative precision).
bool sandwich_holds(double now, double next, double s);

/// E_t[1/p_{t+1}(true)] - 1/p_t(true) under Thompson Sampling, by exact
/// enumeration over actions and outcomes. Zero by the martingale property.
double martingale_residual(const ModelSpace& space, const BeliefState& belief, std::size_t true_index);

struct HittingReport {
  std::optional<std::size_t> tau_a;  ///< first t (1-based) with trace >= A
  std::optional<std::size_t> tau_b;  ///< first t (1-based) with trace <= B
  double a = 0.0;
  double b = 0.0;
};

HittingReport hitting_times(std::span<const double> posterior_trace, double a, double b);

struct HittingProbReport {
  std::size_t runs = 0;
  std::size_t a_first = 0;
  std::size_t b_first = 0;
  std::size_t neither = 0;
  double q_ab = 0.0;  ///< fraction hitting A before B
  double q_ba = 0.0;  ///< fraction hitting B before A
  double non_hit_fraction = 0.0;
  double q_ba_se = 0.0;
  double bound_b = 0.0;    ///< B / p_1(theta_1)
  double bound_gap = 0.0;  ///< (1 - p_1(theta_1)) / (A - B)
  bool passed = false;     ///< q_ba <= min(bounds) + 3 SE
};

/// Monte Carlo estimate of the hitting probabilities of the true model's
/// posterior mass under Thompson Sampling, truncated at `horizon_cap` steps.
HittingProbReport hitting_prob_check(const InstanceBundle& bundle, double a, double b,
                                     std::size_t runs, std::int64_t horizon_cap,
                                     std::uint64_t master_seed, unsigned workers = 0);

/// Exact E_{X~Bern(1/2+d)}[l1(X)/l2(X) - 1] for l1 = Bern(1/2+d), l2 = Bern(1/2-d).
double lr_gap(double delta);
inline double lr_gap_bound(double delta) { return 32.0 * delta * delta; }

struct KlMargin {
  double kl = 0.0;
  double bound = 0.0;
};

class InfiniteKl : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// KL(nu1, alpha nu1 + (1-alpha) nu2) and (1-alpha)^2/2 |mu1 - mu2|^2.
KlMargin kl_mixture_margin(const RewardDistribution& nu1, const RewardDistribution& nu2, double alpha);

struct DriftCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  enum class Relation { GreaterEqual, LessEqual, Equal } relation = Relation::GreaterEqual;
  bool satisfied = false;
};

struct DriftReport {
  std::vector<DriftCheck> checks;
  bool all_satisfied() const;
};

/// One-step drift identities and inequalities of the true model's posterior
/// mass in a two-model space with model 0 true, computed by enumeration.
DriftReport drift_checks(const ModelSpace& space, const BeliefState& belief);

/// N-model instance where model 0 copies the two-model instance's first model
/// and models 1..N-1 copy its second. `general_prior` must split the second
/// model's mass across the clones.
InstanceBundle embed_general_instance(const InstanceBundle& two_model, std::size_t n_models,
                                      const BeliefState& general_prior);

}  // namespace priorsense
