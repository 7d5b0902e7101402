#include "priorsense/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>

#include <fmt/format.h>

#include "priorsense/diagnostics.hpp"
#include "priorsense/experiments.hpp"
#include "priorsense/oracle.hpp"
#include "priorsense/posterior.hpp"
#include "priorsense/sim_engine.hpp"

namespace priorsense {

ModelSpace random_model_space(Rng& rng, std::size_t n_models, std::size_t n_actions,
                              std::size_t support_size) {
  if (support_size == 0) throw std::invalid_argument("support size must be >= 1");
  std::vector<double> support;
  if (support_size == 1) {
    support.push_back(0.5);
  } else {
    for (std::size_t j = 0; j < support_size; ++j) {
      support.push_back(static_cast<double>(j) / static_cast<double>(support_size - 1));
    }
  }
  std::vector<Model> models;
  for (std::size_t m = 0; m < n_models; ++m) {
    std::vector<RewardDistribution> laws;
    for (std::size_t a = 0; a < n_actions; ++a) {
      std::vector<double> w(support_size);
      double total = 0.0;
      for (auto& x : w) {
        x = 0.05 + rng.uniform();
        total += x;
      }
      for (auto& x : w) x /= total;
      laws.emplace_back(support, std::move(w));
    }
    models.emplace_back(std::move(laws));
  }
  return ModelSpace(std::move(models));
}

ModelSpace random_bernoulli_pair(Rng& rng, std::size_t n_actions, double lo, double hi) {
  std::vector<Model> models;
  for (int m = 0; m < 2; ++m) {
    std::vector<RewardDistribution> laws;
    for (std::size_t a = 0; a < n_actions; ++a) {
      laws.push_back(RewardDistribution::bernoulli(lo + (hi - lo) * rng.uniform()));
    }
    models.emplace_back(std::move(laws));
  }
  return ModelSpace(std::move(models));
}

BeliefState random_belief(Rng& rng, std::size_t n, double min_mass) {
  if (static_cast<double>(n) * min_mass > 1.0) throw std::invalid_argument("min_mass too large for n");
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) {
    x = rng.uniform() + 1e-9;
    total += x;
  }
  const double free = 1.0 - static_cast<double>(n) * min_mass;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    w[i] = min_mass + free * w[i] / total;
    sum += w[i];
  }
  w[n - 1] = 1.0 - sum;
  return BeliefState(std::move(w));
}

namespace {

using Clock = std::chrono::steady_clock;

CheckResult timed(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
  const auto start = Clock::now();
  CheckResult r{name, false, "", 0.0};
  try {
    auto [ok, detail] = body();
    r.passed = ok;
    r.detail = std::move(detail);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = fmt::format("exception: {}", e.what());
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

}  // namespace

std::vector<CheckResult> run_verification_battery(const BatteryOptions& options) {
  const std::uint64_t seed = options.seed;
  const unsigned workers = options.workers;
  const std::size_t scale = options.quick ? 10 : 1;
  std::vector<CheckResult> out;

  out.push_back(timed("martingale_identity", [&] {
    Rng rng(stream_seed(seed, 1));
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 4);
      const std::size_t k = 2 + static_cast<std::size_t>(rng.uniform() * 3);
      const std::size_t sup = 1 + static_cast<std::size_t>(rng.uniform() * 4);
      const auto space = random_model_space(rng, n, k, sup);
      const auto belief = random_belief(rng, n, 0.01);
      const std::size_t truth = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
      worst = std::max(worst, std::abs(martingale_residual(space, belief, truth)));
    }
    return std::pair{worst < kIdentityTolerance, fmt::format("max |residual| = {:.3e}", worst)};
  }));

  out.push_back(timed("smoothness_sandwich", [&] {
    Rng rng(stream_seed(seed, 2));
    std::size_t violations = 0, transitions = 0;
    for (int run = 0; run < 100; ++run) {
      InstanceBundle b{random_bernoulli_pair(rng, 2, 0.05, 0.95), random_belief(rng, 2, 0.05), 0, 0.0};
      const double s = smoothness_constant(b.space);
      const auto traj = run_episode(b, AgentKind::ts(), 1000, stream_seed(seed, 1000 + run), true);
      for (std::size_t t = 0; t + 1 < traj.posterior.size(); ++t) {
        for (std::size_t m = 0; m < 2; ++m) {
          const double now = traj.posterior[t][m];
          const double next = traj.posterior[t + 1][m];
          ++transitions;
          if (!sandwich_holds(now, next, s)) ++violations;
        }
      }
    }
    return std::pair{violations == 0, fmt::format("{} violations in {} transitions", violations, transitions)};
  }));

  out.push_back(timed("lr_gap_bound", [&] {
    bool ok = std::abs(lr_gap(0.25) - 4.0 / 3.0) < kIdentityTolerance;
    double worst = -1.0;
    for (int j = 0; j < 50; ++j) {
      const double d = std::sqrt(0.125) * j / 49.0;
      worst = std::max(worst, lr_gap(d) - lr_gap_bound(d));
    }
    ok = ok && worst <= kInequalityTolerance;
    return std::pair{ok, fmt::format("max(lr_gap - 32 d^2) = {:.3e}", worst)};
  }));

  out.push_back(timed("kl_mixture_margin", [&] {
    Rng rng(stream_seed(seed, 3));
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 100; ++i) {
      const auto nu1 = RewardDistribution::bernoulli(rng.uniform());
      const auto nu2 = RewardDistribution::bernoulli(rng.uniform());
      for (int j = 0; j <= 10; ++j) {
        const auto m = kl_mixture_margin(nu1, nu2, j / 10.0);
        worst = std::min(worst, m.kl - m.bound);
      }
    }
    return std::pair{worst >= -kIdentityTolerance, fmt::format("min(kl - bound) = {:.3e}", worst)};
  }));

  out.push_back(timed("drift_checks", [&] {
    Rng rng(stream_seed(seed, 4));
    std::size_t failed = 0;
    for (int i = 0; i < 500; ++i) {
      const auto space = random_bernoulli_pair(rng, 2, 0.02, 0.98);
      const auto belief = random_belief(rng, 2, 0.01);
      if (!drift_checks(space, belief).all_satisfied()) ++failed;
    }
    const auto thm2 = make_poor_prior_instance(0.3, 100);
    if (!drift_checks(thm2.space, BeliefState({0.3, 0.7})).all_satisfied()) ++failed;
    return std::pair{failed == 0, fmt::format("{} of 501 beliefs failed", failed)};
  }));

  out.push_back(timed("oracle_recursions", [&] {
    Rng rng(stream_seed(seed, 5));
    double worst_tree = 0.0, worst_split = 0.0;
    for (int i = 0; i < 20; ++i) {
      InstanceBundle b{random_bernoulli_pair(rng, 2, 0.1, 0.9), BeliefState({0.5, 0.5}), 0, 0.0};
      const double alpha = 0.05 + 0.9 * rng.uniform();
      for (std::int64_t t = 0; t <= 6; ++t) {
        worst_tree = std::max(worst_tree, std::abs(exact_ts_regret(b, alpha, t) - exact_ts_regret_tree(b, alpha, t)));
      }
      const auto q = action_optimality_mass(BeliefState({alpha, 1 - alpha}), b.space);
      const double split = q[0] * exact_forced_regret(b, alpha, 8, 0) + q[1] * exact_forced_regret(b, alpha, 8, 1);
      worst_split = std::max(worst_split, std::abs(split - exact_ts_regret(b, alpha, 8)));
    }
    return std::pair{worst_tree < kIdentityTolerance && worst_split < kIdentityTolerance,
                     fmt::format("memo vs tree {:.2e}, first-step split {:.2e}", worst_tree, worst_split)};
  }));

  out.push_back(timed("decreasing_regret", [&] {
    std::vector<double> grid;
    for (int j = 1; j <= 19; ++j) grid.push_back(0.05 * j);
    double worst = -1.0;
    for (std::int64_t t : {4, 8, 12}) {
      for (const auto& b : {make_poor_prior_instance(0.5, t), make_good_prior_instance(0.5, t)}) {
        worst = std::max(worst, monotonicity_report(b, t, grid).worst_increase);
      }
    }
    return std::pair{worst <= 1e-9, fmt::format("largest increase along the grid {:.3e}", worst)};
  }));

  out.push_back(timed("oracle_vs_monte_carlo", [&] {
    const auto b = make_poor_prior_instance(0.3, 8);
    const double exact = exact_ts_regret(b, 0.3, 8);
    const auto mc = monte_carlo(b, AgentKind::ts(), 8, 200000 / scale, stream_seed(seed, 6), workers);
    const double z = std::abs(mc.mean_regret - exact) / mc.std_error;
    return std::pair{z <= 3.0, fmt::format("exact {:.6f}, MC {:.6f} +- {:.6f} (z={:.2f})", exact, mc.mean_regret,
                                           mc.std_error, z)};
  }));

  out.push_back(timed("hitting_probability", [&] {
    const auto b = poor_prior_instance_with_gap(0.5, 0.05);
    const auto r = hitting_prob_check(b, 0.75, 0.25, 20000 / scale, 100000, stream_seed(seed, 7), workers);
    const bool consistent = r.a_first + r.b_first + r.neither == r.runs;
    return std::pair{r.passed && consistent,
                     fmt::format("q_BA={:.4f} (SE {:.4f}) <= min({:.3f},{:.3f}); non-hit {:.4f}", r.q_ba, r.q_ba_se,
                                 r.bound_b, r.bound_gap, r.non_hit_fraction)};
  }));

  out.push_back(timed("embedding_equivalence", [&] {
    const auto base = poor_prior_instance_with_gap(0.2, 0.05);
    const auto general = embed_general_instance(base, 5, BeliefState({0.2, 0.2, 0.2, 0.2, 0.2}));
    const std::size_t runs = 2000 / scale;
    const auto a = monte_carlo(base, AgentKind::ts(), 2000, runs, stream_seed(seed, 8), workers);
    const auto g = monte_carlo(general, AgentKind::ts(), 2000, runs, stream_seed(seed, 9), workers);
    const double joint = std::hypot(a.std_error, g.std_error);
    return std::pair{std::abs(a.mean_regret - g.mean_regret) <= 3.0 * joint,
                     fmt::format("base {:.3f}, N=5 {:.3f}, joint SE {:.3f}", a.mean_regret, g.mean_regret, joint)};
  }));

  out.push_back(timed("bayes_regret_dominates", [&] {
    const auto b = poor_prior_instance_with_gap(0.3, 0.1);
    const std::size_t runs = 2000 / scale;
    const double bayes = bayes_regret(b.space, b.prior, AgentKind::ts(), 500, runs, stream_seed(seed, 10), workers);
    const auto own = monte_carlo(b, AgentKind::ts(), 500, runs, stream_seed(seed, 11), workers);
    const double rhs = b.prior[0] * own.mean_regret;
    // Both sides are Monte Carlo estimates; allow 3 SE of the right-hand side.
    return std::pair{bayes >= rhs - 3.0 * b.prior[0] * own.std_error,
                     fmt::format("Bayes {:.3f} >= p1 * R(theta1) = {:.3f}", bayes, rhs)};
  }));

  for (auto kind : {BoundKind::Thm2, BoundKind::Thm3}) {
    const bool poor = kind == BoundKind::Thm2;
    out.push_back(timed(poor ? "poor_prior_bounds" : "good_prior_bounds", [&] {
      const auto r = run_bound_check(kind, poor ? 0.01 : 0.999, 10000, 2000 / scale, stream_seed(seed, poor ? 12 : 13),
                                     workers);
      return std::pair{r.lower_ok && r.upper_ok,
                       fmt::format("{:.4f} <= mean {:.4f} +- {:.4f} <= {:.4f}", r.lower_bound, r.mean_regret,
                                   r.std_error, r.upper_bound)};
    }));
  }
  return out;
}

void print_check_table(std::ostream& out, const std::vector<CheckResult>& results) {
  std::size_t width = 5;
  for (const auto& r : results) width = std::max(width, r.name.size());
  for (const auto& r : results) {
    out << fmt::format("{:<{}}  {}  {:7.2f}s  {}\n", r.name, width, r.passed ? "PASS" : "FAIL", r.seconds, r.detail);
  }
}

void write_check_csv(std::ostream& out, const std::vector<CheckResult>& results) {
  out << "check,passed,seconds,detail\n";
  for (const auto& r : results) {
    std::string detail = r.detail;
    std::replace(detail.begin(), detail.end(), ',', ';');
    out << r.name << ',' << (r.passed ? 1 : 0) << ',' << fmt::format("{:.3f}", r.seconds) << ',' << detail << '\n';
  }
}

}  // namespace priorsense
