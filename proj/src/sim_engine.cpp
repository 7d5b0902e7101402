#include "priorsense/sim_engine.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include <fmt/format.h>

namespace priorsense {

unsigned default_worker_count() {
  if (const char* env = std::getenv("PRIORSENSE_THREADS"); env != nullptr && *env != '\0') {
    try {
      const long n = std::stol(env);
      if (n >= 1) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
      // fall through to hardware concurrency
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

AnyAgent make_agent(const InstanceBundle& bundle, const AgentKind& kind, std::int64_t horizon) {
  switch (kind.type) {
    case AgentKind::Type::Ts:
      return ThompsonAgent(bundle.space, bundle.prior);
    case AgentKind::Type::Exp4:
      return Exp4Agent(bundle.space, bundle.prior, exp4_gamma(bundle.prior, horizon));
    case AgentKind::Type::Fixed:
      return FixedAgent(kind.fixed_action, bundle.space.action_count());
  }
  throw std::invalid_argument("unknown agent kind");
}

std::size_t sample_outcome(const ModelSpace& space, std::size_t model, std::size_t action, Rng& rng) {
  const auto probs = space.outcome_probs(model, action);
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t x = 0; x < probs.size(); ++x) {
    if (probs[x] <= 0.0) continue;
    last_positive = x;
    cumulative += probs[x];
    if (u < cumulative) return x;
  }
  return last_positive;
}

namespace {

void check_episode_args(const InstanceBundle& bundle, std::int64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("episode length T must be >= 1");
  validate(bundle);
}

}  // namespace

Trajectory run_episode(const InstanceBundle& bundle, const AgentKind& kind, std::int64_t horizon,
                       std::uint64_t seed, bool record_posterior) {
  check_episode_args(bundle, horizon);
  Trajectory traj;
  traj.steps.reserve(static_cast<std::size_t>(horizon));
  if (record_posterior) traj.posterior.reserve(static_cast<std::size_t>(horizon));

  AnyAgent agent = make_agent(bundle, kind, horizon);
  Rng rng(seed);
  std::visit(
      [&](auto& a) {
        std::vector<double> before;
        if constexpr (std::is_same_v<std::decay_t<decltype(a)>, ThompsonAgent>) {
          if (record_posterior) before.assign(a.mass().begin(), a.mass().end());
        }
        run_loop(bundle.space, bundle.true_model, a, horizon, rng,
                 [&](std::int64_t, std::size_t action, std::size_t outcome, double gap, auto& ag) {
                   traj.steps.push_back({action, bundle.space.shared_support()[outcome], gap});
                   traj.cumulative_regret += gap;
                   if constexpr (std::is_same_v<std::decay_t<decltype(ag)>, ThompsonAgent>) {
                     if (record_posterior) {
                       traj.posterior.push_back(std::move(before));
                       before.assign(ag.mass().begin(), ag.mass().end());
                     }
                   }
                   return true;
                 });
      },
      agent);
  return traj;
}

double episode_regret(const InstanceBundle& bundle, const AgentKind& kind, std::int64_t horizon,
                      std::uint64_t seed) {
  check_episode_args(bundle, horizon);
  AnyAgent agent = make_agent(bundle, kind, horizon);
  Rng rng(seed);
  double regret = 0.0;
  std::visit(
      [&](auto& a) {
        run_loop(bundle.space, bundle.true_model, a, horizon, rng,
                 [&](std::int64_t, std::size_t, std::size_t, double gap, auto&) {
                   regret += gap;
                   return true;
                 });
      },
      agent);
  return regret;
}

MonteCarloSummary summarize(std::vector<double> per_run) {
  if (per_run.empty()) throw std::invalid_argument("cannot summarize zero runs");
  MonteCarloSummary s;
  s.run_count = per_run.size();
  const double n = static_cast<double>(per_run.size());
  double sum = 0.0;
  for (double r : per_run) sum += r;
  s.mean_regret = sum / n;
  if (per_run.size() >= 2) {
    double ss = 0.0;
    for (double r : per_run) ss += (r - s.mean_regret) * (r - s.mean_regret);
    s.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  s.per_run_regrets = std::move(per_run);
  return s;
}

MonteCarloSummary monte_carlo(const InstanceBundle& bundle, const AgentKind& kind,
                              std::int64_t horizon, std::size_t runs, std::uint64_t master_seed,
                              unsigned workers) {
  if (runs < 1) throw std::invalid_argument("monte_carlo needs at least one run");
  check_episode_args(bundle, horizon);
  std::vector<double> per_run(runs, 0.0);
  parallel_for(runs, workers, [&](std::size_t k) {
    per_run[k] = episode_regret(bundle, kind, horizon, stream_seed(master_seed, k));
  });
  return summarize(std::move(per_run));
}

double bayes_regret(const ModelSpace& space, const BeliefState& prior, const AgentKind& kind,
                    std::int64_t horizon, std::size_t runs_per_model, std::uint64_t master_seed,
                    unsigned workers) {
  if (runs_per_model < 1) throw std::invalid_argument("bayes_regret needs runs_per_model >= 1");
  if (prior.size() != space.model_count()) {
    throw std::invalid_argument("prior length does not match the model count");
  }
  double total = 0.0;
  for (std::size_t m = 0; m < space.model_count(); ++m) {
    if (prior[m] == 0.0) continue;
    InstanceBundle bundle{space, prior, m, 0.0};
    total += prior[m] *
             monte_carlo(bundle, kind, horizon, runs_per_model, stream_seed(master_seed, m), workers)
                 .mean_regret;
  }
  return total;
}

}  // namespace priorsense
