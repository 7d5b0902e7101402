// Acceptance suite: one line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "priorsense/diagnostics.hpp"
#include "priorsense/experiments.hpp"
#include "priorsense/io.hpp"
#include "priorsense/oracle.hpp"
#include "priorsense/posterior.hpp"
#include "priorsense/sim_engine.hpp"
#include "priorsense/verify.hpp"

using namespace priorsense;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o{false, ""};
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, fmt::format("exception: {}", e.what())};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.passed) ++failures;
  std::cout << fmt::format("[{}] {:>2} {:<28} {:8.2f}s  {}\n", o.passed ? "PASS" : "FAIL", id, name, secs, o.detail)
            << std::flush;
}

Outcome martingale() {
  Rng rng(stream_seed(2024, 1));
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 4);
    const std::size_t k = 2 + static_cast<std::size_t>(rng.uniform() * 3);
    const std::size_t sup = 1 + static_cast<std::size_t>(rng.uniform() * 4);
    const auto space = random_model_space(rng, n, k, sup);
    const auto belief = random_belief(rng, n, 0.01);
    const auto truth = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
    worst = std::max(worst, std::abs(martingale_residual(space, belief, truth)));
  }
  return {worst < 1e-12, fmt::format("1000 instances, max |residual| {:.2e} < 1e-12", worst)};
}

Outcome sandwich() {
  Rng rng(stream_seed(2024, 2));
  std::size_t violations = 0, steps = 0;
  for (int run = 0; run < 100; ++run) {
    InstanceBundle b{random_bernoulli_pair(rng, 2, 0.05, 0.95), random_belief(rng, 2, 0.05), 0, 0.0};
    const double s = smoothness_constant(b.space);
    const auto traj = run_episode(b, AgentKind::ts(), 1000, stream_seed(2024, 100 + run), true);
    for (std::size_t t = 0; t + 1 < traj.posterior.size(); ++t) {
      for (std::size_t m = 0; m < 2; ++m) {
        const double now = traj.posterior[t][m], next = traj.posterior[t + 1][m];
        ++steps;
        if (!sandwich_holds(now, next, s)) ++violations;
      }
    }
  }
  return {violations == 0, fmt::format("{} violations over {} posterior steps", violations, steps)};
}

Outcome oracle_vs_mc() {
  const auto b = make_poor_prior_instance(0.3, 8);
  const double exact = exact_ts_regret(b, 0.3, 8);
  const auto mc = monte_carlo(b, AgentKind::ts(), 8, 1000000, 2024);
  const double z = std::abs(mc.mean_regret - exact) / mc.std_error;
  return {z <= 3.0, fmt::format("exact {:.6f}, MC {:.6f} (SE {:.6f}), |z| = {:.2f} <= 3", exact, mc.mean_regret,
                                mc.std_error, z)};
}

Outcome decreasing() {
  std::vector<double> grid;
  for (int j = 1; j <= 19; ++j) grid.push_back(0.05 * j);
  double worst = -1.0;
  bool ok = true;
  for (std::int64_t t : {4, 8, 12}) {
    for (const auto& b : {make_poor_prior_instance(0.5, t), make_good_prior_instance(0.5, t)}) {
      const auto r = monotonicity_report(b, t, grid);
      ok = ok && r.nonincreasing;
      worst = std::max(worst, r.worst_increase);
    }
  }
  return {ok, fmt::format("largest step increase {:.3e} <= 1e-9", worst)};
}

BoundCheckReport thm2_report, thm3_report;

Outcome thm2_lower() {
  thm2_report = run_bound_check(BoundKind::Thm2, 0.01, 10000, 2000, 2024);
  const auto& r = thm2_report;
  return {r.lower_ok, fmt::format("mean {:.3f} + 3 SE ({:.3f}) >= {:.4f}", r.mean_regret, r.std_error, r.lower_bound)};
}

Outcome thm3_lower() {
  thm3_report = run_bound_check(BoundKind::Thm3, 0.999, 10000, 2000, 2025);
  const auto& r = thm3_report;
  return {r.lower_ok, fmt::format("mean {:.4f} + 3 SE ({:.4f}) >= {:.4f}", r.mean_regret, r.std_error, r.lower_bound)};
}

Outcome upper() {
  const bool ok = thm2_report.upper_ok && thm3_report.upper_ok && thm2_report.runs > 0 && thm3_report.runs > 0;
  return {ok, fmt::format("poor: {:.3f} - 3 SE <= {:.3f}; good: {:.4f} - 3 SE <= {:.4f}", thm2_report.mean_regret,
                          thm2_report.upper_bound, thm3_report.mean_regret, thm3_report.upper_bound)};
}

Outcome scaling() {
  std::string detail;
  bool ok = true;
  for (auto which : {PriorCase::Poor, PriorCase::Good}) {
    auto config = ExperimentConfig::defaults(which);
    config.master_seed = 2024;
    const auto result = run_scaling_experiment(config);
    const double threshold = which == PriorCase::Poor ? 0.95 : 0.90;
    for (const auto& f : result.fits) {
      const double r2 = f.fit ? f.fit->r_squared : -1.0;
      ok = ok && r2 >= threshold;
      detail += fmt::format("{} N={} R2={:.4f} (>= {:.2f}); ", to_string(which), f.n_models, r2, threshold);
    }
    if (which == PriorCase::Poor) {
      // informational only: rows whose regret is below the dT(1-p) ceiling
      for (const auto& f : fit_rows(which, result.rows, 0.01)) {
        if (f.fit) detail += fmt::format("[info: poor N={} p>=0.01 R2={:.4f}] ", f.n_models, f.fit->r_squared);
      }
    }
  }
  return {ok, detail};
}

Outcome hitting() {
  const auto b = poor_prior_instance_with_gap(0.5, 0.05);
  const auto r = hitting_prob_check(b, 0.75, 0.25, 100000, 100000, 2024);
  return {r.passed, fmt::format("q_BA {:.4f} <= min({:.3f}, {:.3f}) + 3 x {:.4f}; non-hit {:.4f}", r.q_ba, r.bound_b,
                                r.bound_gap, r.q_ba_se, r.non_hit_fraction)};
}

Outcome closed_form() {
  bool ok = std::abs(lr_gap(0.25) - 4.0 / 3.0) < 1e-12;
  double worst_lr = -1.0;
  for (int j = 0; j < 50; ++j) {
    const double d = std::sqrt(0.125) * j / 49.0;
    worst_lr = std::max(worst_lr, lr_gap(d) - lr_gap_bound(d));
  }
  ok = ok && worst_lr <= 1e-10;
  Rng rng(stream_seed(2024, 10));
  double worst_kl = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    const auto nu1 = RewardDistribution::bernoulli(rng.uniform());
    const auto nu2 = RewardDistribution::bernoulli(rng.uniform());
    for (int j = 0; j <= 10; ++j) {
      const auto m = kl_mixture_margin(nu1, nu2, j / 10.0);
      worst_kl = std::min(worst_kl, m.kl - m.bound);
    }
  }
  ok = ok && worst_kl >= -1e-12;
  return {ok, fmt::format("lr_gap(0.25) = 4/3, max(lr_gap - 32d^2) {:.3e}, min(kl - bound) {:.3e}", worst_lr,
                          worst_kl)};
}

Outcome embedding() {
  const auto base = poor_prior_instance_with_gap(0.2, 0.05);
  const auto general = embed_general_instance(base, 5, BeliefState({0.2, 0.2, 0.2, 0.2, 0.2}));
  const auto a = monte_carlo(base, AgentKind::ts(), 10000, 2000, stream_seed(2024, 11));
  const auto g = monte_carlo(general, AgentKind::ts(), 10000, 2000, stream_seed(2024, 12));
  const double joint = std::hypot(a.std_error, g.std_error);
  const double diff = std::abs(a.mean_regret - g.mean_regret);
  return {diff <= 3 * joint, fmt::format("base {:.3f}, N=5 {:.3f}, |diff| {:.3f} <= 3 x {:.3f}", a.mean_regret,
                                         g.mean_regret, diff, joint)};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "priorsense_acceptance_determinism";
  fs::remove_all(root);
  auto invoke = [&](const std::string& tag, int threads) {
    const auto dir = root / tag;
    const std::string cmd = fmt::format(
        "PRIORSENSE_THREADS={} \"{}\" experiment --case both --seed 99 --T 1000 --runs 200 --out-dir \"{}\" > /dev/null",
        threads, PRIORSENSE_CLI_PATH, dir.string());
    if (std::system(cmd.c_str()) != 0) throw std::runtime_error("CLI invocation failed: " + cmd);
    return dir;
  };
  const auto a = invoke("w1a", 1), b = invoke("w1b", 1), c = invoke("w4a", 4), d = invoke("w4b", 4);
  std::size_t compared = 0;
  bool ok = true;
  for (const char* name : {"summary_poor.csv", "summary_good.csv", "fit_poor.csv", "fit_good.csv"}) {
    const auto ref = read_file((a / name).string());
    ok = ok && !ref.empty();
    for (const auto& other : {b, c, d}) {
      ok = ok && read_file((other / name).string()) == ref;
      ++compared;
    }
  }
  return {ok, fmt::format("{} CSV comparisons byte-identical across 1 and 4 workers", compared)};
}

}  // namespace

int main() {
  criterion(1, "martingale identity", martingale);
  criterion(2, "smoothness sandwich", sandwich);
  criterion(3, "oracle vs Monte Carlo", oracle_vs_mc);
  criterion(4, "decreasing regret", decreasing);
  criterion(5, "poor-prior lower bound", thm2_lower);
  criterion(6, "good-prior lower bound", thm3_lower);
  criterion(7, "upper bound dT(1-p)", upper);
  criterion(8, "scaling fits", scaling);
  criterion(9, "hitting probability", hitting);
  criterion(10, "closed-form bound checks", closed_form);
  criterion(11, "embedding equivalence", embedding);
  criterion(12, "determinism", determinism);
  std::cout << fmt::format("{} of 12 criteria passed\n", 12 - failures);
  return failures == 0 ? 0 : 1;
}
