#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "priorsense/model_space.hpp"

namespace priorsense {

class InsufficientPoints : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares. Constant ys give R^2 = 1 by convention.
/// Throws InsufficientPoints unless there are two distinct x values.
FitResult linear_fit(std::span<const double> xs, std::span<const double> ys);

struct ExperimentConfig {
  PriorCase which = PriorCase::Poor;
  std::vector<std::size_t> n_list{2, 5};
  std::vector<double> p_list;
  double delta = 0.05;
  std::int64_t horizon = 10000;
  std::size_t runs = 2000;
  std::uint64_t master_seed = 1;
  std::string out_dir = ".";
  /// Only rows with p >= fit_min_p enter the fit.
  double fit_min_p = 0.0;

  static ExperimentConfig defaults(PriorCase which);
  /// Throws std::invalid_argument on a broken invariant.
  void validate() const;
};

const char* to_string(PriorCase which);
PriorCase parse_prior_case(std::string_view text);

/// One Monte Carlo summary line of the experiment CSV.
struct SummaryRow {
  std::string instance_id;
  double p = 0.0;
  std::size_t n_models = 0;
  std::int64_t horizon = 0;
  std::size_t runs = 0;
  double mean_regret = 0.0;
  double std_error = 0.0;
};

/// Regressor of the scaling plot: sqrt(1/p) for poor priors, sqrt(1-p) for good.
double scaling_x(PriorCase which, double p);

struct ScalingFit {
  std::size_t n_models = 0;
  std::size_t points = 0;
  std::optional<FitResult> fit;  ///< empty when there are too few points
};

struct ScalingResult {
  PriorCase which = PriorCase::Poor;
  std::vector<SummaryRow> rows;
  std::vector<ScalingFit> fits;
};

/// Fits mean regret against scaling_x per model count, using rows with p >= min_p.
std::vector<ScalingFit> fit_rows(PriorCase which, std::span<const SummaryRow> rows, double min_p);

/// Runs Thompson Sampling over every (N, p) of the config. The instance for
/// each N is drawn once from the master seed and shared by all p.
ScalingResult run_scaling_experiment(const ExperimentConfig& config, unsigned workers = 0);

enum class BoundKind { Thm2, Thm3 };

struct BoundCheckReport {
  BoundKind kind = BoundKind::Thm2;
  double p = 0.0;
  std::int64_t horizon = 0;
  std::size_t runs = 0;
  double delta = 0.0;
  double mean_regret = 0.0;
  double std_error = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;  ///< delta * T * (1 - p)
  bool lower_ok = false;     ///< mean + 3 SE >= lower_bound
  bool upper_ok = false;     ///< mean - 3 SE <= upper_bound
};

/// Closed-form regret lower bounds of the two lower-bound instances.
double poor_prior_lower_bound(double p, std::int64_t horizon);
double good_prior_lower_bound(double p, std::int64_t horizon);

BoundCheckReport run_bound_check(BoundKind kind, double p, std::int64_t horizon, std::size_t runs,
                                 std::uint64_t master_seed, unsigned workers = 0);

}  // namespace priorsense
