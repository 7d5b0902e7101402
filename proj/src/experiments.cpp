#include "priorsense/experiments.hpp"

#include <cmath>
#include <set>

#include <fmt/format.h>

#include "priorsense/sim_engine.hpp"

namespace priorsense {

FitResult linear_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("linear_fit: xs and ys differ in length");
  if (xs.size() < 2) throw InsufficientPoints("insufficient points: need at least two x values");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw InsufficientPoints("insufficient points: x values are all equal");
  FitResult f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (syy == 0.0) {
    f.r_squared = 1.0;
  } else {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = ys[i] - (f.intercept + f.slope * xs[i]);
      ss_res += r * r;
    }
    f.r_squared = 1.0 - ss_res / syy;
  }
  return f;
}

const char* to_string(PriorCase which) { return which == PriorCase::Poor ? "poor" : "good"; }

PriorCase parse_prior_case(std::string_view text) {
  if (text == "poor") return PriorCase::Poor;
  if (text == "good") return PriorCase::Good;
  throw std::invalid_argument(fmt::format("unknown prior case '{}' (expected poor or good)", text));
}

ExperimentConfig ExperimentConfig::defaults(PriorCase which) {
  ExperimentConfig c;
  c.which = which;
  if (which == PriorCase::Poor) {
    c.p_list = {0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1};
    c.fit_min_p = 0.0;
  } else {
    c.p_list = {0.995, 0.998, 0.999, 0.9995, 0.9998, 0.9999};
    c.fit_min_p = 0.999;
  }
  return c;
}

void ExperimentConfig::validate() const {
  if (p_list.empty()) throw std::invalid_argument("experiment config: p_list is empty");
  for (double p : p_list) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument(fmt::format("experiment config: p={} outside (0,1)", p));
  }
  if (n_list.empty()) throw std::invalid_argument("experiment config: N list is empty");
  for (auto n : n_list) {
    if (n < 2) throw std::invalid_argument("experiment config: every N must be >= 2");
  }
  if (runs < 2) throw std::invalid_argument("experiment config: runs must be >= 2");
  if (!(delta > 0.0 && delta <= 0.25)) throw std::invalid_argument("experiment config: delta must lie in (0, 1/4]");
  if (horizon < 1) throw std::invalid_argument("experiment config: T must be >= 1");
}

double scaling_x(PriorCase which, double p) {
  return which == PriorCase::Poor ? std::sqrt(1.0 / p) : std::sqrt(1.0 - p);
}

std::vector<ScalingFit> fit_rows(PriorCase which, std::span<const SummaryRow> rows, double min_p) {
  std::set<std::size_t> ns;
  for (const auto& r : rows) ns.insert(r.n_models);
  std::vector<ScalingFit> fits;
  for (auto n : ns) {
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
      if (r.n_models != n || r.p < min_p) continue;
      xs.push_back(scaling_x(which, r.p));
      ys.push_back(r.mean_regret);
    }
    ScalingFit f;
    f.n_models = n;
    f.points = xs.size();
    try {
      f.fit = linear_fit(xs, ys);
    } catch (const InsufficientPoints&) {
      f.fit.reset();
    }
    fits.push_back(f);
  }
  return fits;
}

ScalingResult run_scaling_experiment(const ExperimentConfig& config, unsigned workers) {
  config.validate();
  ScalingResult result;
  result.which = config.which;
  for (std::size_t ni = 0; ni < config.n_list.size(); ++ni) {
    const std::size_t n = config.n_list[ni];
    const std::uint64_t instance_seed = stream_seed(config.master_seed, n);
    Rng instance_rng(instance_seed);
    InstanceBundle bundle;
    try {
      bundle = make_scaling_instance(n, config.delta, config.which, instance_rng);
    } catch (const std::exception& e) {
      throw std::runtime_error(fmt::format("building the {} instance with N={} failed: {}",
                                           to_string(config.which), n, e.what()));
    }
    for (std::size_t j = 0; j < config.p_list.size(); ++j) {
      const double p = config.p_list[j];
      bundle.prior = BeliefState::with_true_mass(n, p);
      const auto mc = monte_carlo(bundle, AgentKind::ts(), config.horizon, config.runs,
                                  stream_seed(instance_seed, j + 1), workers);
      result.rows.push_back({fmt::format("{}-N{}", to_string(config.which), n), p, n, config.horizon,
                             config.runs, mc.mean_regret, mc.std_error});
    }
  }
  result.fits = fit_rows(config.which, result.rows, config.fit_min_p);
  return result;
}

double poor_prior_lower_bound(double p, std::int64_t horizon) {
  return std::sqrt(static_cast<double>(horizon) / p) / (168.0 * std::sqrt(2.0));
}

double good_prior_lower_bound(double p, std::int64_t horizon) {
  return std::sqrt((1.0 - p) * static_cast<double>(horizon)) / (10.0 * std::sqrt(2.0));
}

BoundCheckReport run_bound_check(BoundKind kind, double p, std::int64_t horizon, std::size_t runs,
                                 std::uint64_t master_seed, unsigned workers) {
  if (runs < 2) throw std::invalid_argument("bound check needs runs >= 2");
  BoundCheckReport r;
  r.kind = kind;
  r.p = p;
  r.horizon = horizon;
  r.runs = runs;
  InstanceBundle bundle;
  if (kind == BoundKind::Thm2) {
    if (!(p > 0.0 && p <= 0.5)) {
      throw std::invalid_argument(fmt::format("poor-prior bound needs p <= 1/2, got {}", p));
    }
    bundle = make_poor_prior_instance(p, horizon);
    r.lower_bound = poor_prior_lower_bound(p, horizon);
  } else {
    bundle = make_good_prior_instance(p, horizon);
    r.lower_bound = good_prior_lower_bound(p, horizon);
  }
  r.delta = bundle.delta;
  const auto mc = monte_carlo(bundle, AgentKind::ts(), horizon, runs, master_seed, workers);
  r.mean_regret = mc.mean_regret;
  r.std_error = mc.std_error;
  r.upper_bound = r.delta * static_cast<double>(horizon) * (1.0 - p);
  r.lower_ok = r.mean_regret + 3.0 * r.std_error >= r.lower_bound;
  r.upper_ok = r.mean_regret - 3.0 * r.std_error <= r.upper_bound;
  return r;
}

}  // namespace priorsense
