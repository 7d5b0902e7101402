#include "priorsense/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "priorsense/posterior.hpp"

namespace priorsense {

namespace {

void check_two_by_two_bernoulli(const InstanceBundle& bundle) {
  validate(bundle);
  const auto& space = bundle.space;
  if (space.model_count() != 2 || space.action_count() != 2) {
    throw std::invalid_argument("oracle needs a 2-model, 2-action instance");
  }
  const auto support = space.shared_support();
  if (support.size() != 2 || support[0] != 0.0 || support[1] != 1.0) {
    throw std::invalid_argument("oracle needs Bernoulli rewards on {0,1}");
  }
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0,1]");
}

class RegretTable {
 public:
  RegretTable(const InstanceBundle& bundle, double alpha, std::int64_t horizon)
      : space_(bundle.space),
        truth_(bundle.true_model),
        alpha_(alpha),
        horizon_(horizon),
        side_(static_cast<std::size_t>(horizon) + 1),
        memo_(side_ * side_ * side_ * side_, std::numeric_limits<double>::quiet_NaN()) {
    const double best = space_.mean(truth_, space_.optimal_action(truth_));
    for (std::size_t a = 0; a < 2; ++a) gap_[a] = best - space_.mean(truth_, a);
  }

  /// Expected regret still to come after the observations in `s`.
  double value(SufficientStats& s) {
    if (s.total() >= horizon_) return 0.0;
    double& slot = memo_[key(s)];
    if (!std::isnan(slot)) return slot;

    const double p0 = posterior_first(s);
    double mass[2] = {0.0, 0.0};
    mass[space_.optimal_action(0)] += p0;
    mass[space_.optimal_action(1)] += 1.0 - p0;

    double v = 0.0;
    for (std::size_t a = 0; a < 2; ++a) {
      if (mass[a] == 0.0) continue;
      v += mass[a] * after_action(s, a);
    }
    slot = v;
    return v;
  }

  /// Regret of playing `a` now plus the expected remainder.
  double after_action(SufficientStats& s, std::size_t a) {
    double v = gap_[a];
    for (std::size_t o = 0; o < 2; ++o) {
      const double l = space_.likelihood_at(truth_, a, o);
      if (l == 0.0) continue;
      ++s.counts[a][o];
      v += l * value(s);
      --s.counts[a][o];
    }
    return v;
  }

 private:
  std::size_t key(const SufficientStats& s) const noexcept {
    const auto& n = s.counts;
    return ((n[0][0] * side_ + n[0][1]) * side_ + n[1][0]) * side_ + n[1][1];
  }

  double posterior_first(const SufficientStats& s) const {
    double w[2] = {alpha_, 1.0 - alpha_};
    for (std::size_t m = 0; m < 2; ++m) {
      for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t o = 0; o < 2; ++o) {
          w[m] *= std::pow(space_.likelihood_at(m, a, o), s.counts[a][o]);
        }
      }
    }
    const double total = w[0] + w[1];
    if (!(total > 0.0)) throw ImpossibleObservation("oracle reached a state with zero evidence");
    return w[0] / total;
  }

  const ModelSpace& space_;
  std::size_t truth_;
  double alpha_;
  std::int64_t horizon_;
  std::size_t side_;
  std::vector<double> memo_;
  double gap_[2]{};
};

void check_horizon(std::int64_t horizon, std::int64_t cap) {
  if (horizon < 0) throw std::invalid_argument("oracle horizon must be >= 0");
  if (horizon > cap) {
    throw std::invalid_argument(fmt::format("oracle horizon {} exceeds the cap {}", horizon, cap));
  }
}

double tree_value(const ModelSpace& space, std::size_t truth, const BeliefState& belief,
                  std::int64_t remaining) {
  if (remaining == 0) return 0.0;
  const double best = space.mean(truth, space.optimal_action(truth));
  const auto q = action_optimality_mass(belief, space);
  double v = 0.0;
  for (std::size_t a = 0; a < space.action_count(); ++a) {
    if (q[a] == 0.0) continue;
    double branch = best - space.mean(truth, a);
    for (std::size_t o = 0; o < space.outcome_count(); ++o) {
      const double l = space.likelihood_at(truth, a, o);
      if (l == 0.0) continue;
      const auto next = bayes_update(belief, a, space.shared_support()[o], space);
      branch += l * tree_value(space, truth, next, remaining - 1);
    }
    v += q[a] * branch;
  }
  return v;
}

}  // namespace

double exact_ts_regret(const InstanceBundle& bundle, double alpha, std::int64_t horizon, std::int64_t cap) {
  check_two_by_two_bernoulli(bundle);
  check_alpha(alpha);
  check_horizon(horizon, cap);
  if (horizon == 0) return 0.0;
  RegretTable table(bundle, alpha, horizon);
  SufficientStats s;
  return table.value(s);
}

double exact_forced_regret(const InstanceBundle& bundle, double alpha, std::int64_t horizon,
                           std::size_t first_action, std::int64_t cap) {
  check_two_by_two_bernoulli(bundle);
  check_alpha(alpha);
  check_horizon(horizon, cap);
  if (first_action >= 2) throw std::invalid_argument("forced action out of range");
  if (horizon == 0) return 0.0;
  RegretTable table(bundle, alpha, horizon);
  SufficientStats s;
  return table.after_action(s, first_action);
}

double exact_ts_regret_tree(const InstanceBundle& bundle, double alpha, std::int64_t horizon) {
  check_two_by_two_bernoulli(bundle);
  check_alpha(alpha);
  if (horizon < 0) throw std::invalid_argument("oracle horizon must be >= 0");
  return tree_value(bundle.space, bundle.true_model, BeliefState({alpha, 1.0 - alpha}), horizon);
}

MonotonicityReport monotonicity_report(const InstanceBundle& bundle, std::int64_t horizon,
                                       const std::vector<double>& alpha_grid, std::int64_t cap) {
  if (alpha_grid.empty()) throw std::invalid_argument("monotonicity grid is empty");
  for (std::size_t j = 0; j < alpha_grid.size(); ++j) {
    if (!(alpha_grid[j] > 0.0 && alpha_grid[j] < 1.0)) {
      throw std::invalid_argument("monotonicity grid values must lie in (0,1)");
    }
    if (j > 0 && !(alpha_grid[j] > alpha_grid[j - 1])) {
      throw std::invalid_argument("monotonicity grid must be strictly increasing");
    }
  }
  MonotonicityReport r;
  r.alphas = alpha_grid;
  r.worst_increase = -std::numeric_limits<double>::infinity();
  for (double alpha : alpha_grid) r.regrets.push_back(exact_ts_regret(bundle, alpha, horizon, cap));
  for (std::size_t j = 1; j < r.regrets.size(); ++j) {
    r.worst_increase = std::max(r.worst_increase, r.regrets[j] - r.regrets[j - 1]);
  }
  if (r.regrets.size() < 2) r.worst_increase = 0.0;
  r.nonincreasing = r.worst_increase <= 1e-9;
  return r;
}

}  // namespace priorsense
