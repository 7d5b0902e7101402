#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <variant>
#include <vector>

#include "priorsense/agents.hpp"
#include "priorsense/model_space.hpp"
#include "priorsense/rng.hpp"

namespace priorsense {

struct StepRecord {
  std::size_t action = 0;
  double reward = 0.0;
  /// Expected gap of the played action under the true model.
  double gap = 0.0;
};

struct Trajectory {
  std::vector<StepRecord> steps;
  /// Belief before each step (p_1 ... p_T); empty unless requested.
  std::vector<std::vector<double>> posterior;
  double cumulative_regret = 0.0;
};

struct MonteCarloSummary {
  double mean_regret = 0.0;
  double std_error = 0.0;
  std::size_t run_count = 0;
  std::vector<double> per_run_regrets;
};

/// Worker count from PRIORSENSE_THREADS, else hardware concurrency (at least 1).
unsigned default_worker_count();

/// Calls fn(i) for i in [0, n) on up to `workers` threads (0 = default).
/// Rethrows the first exception raised by any call.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = default_worker_count();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(n);
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

using AnyAgent = std::variant<ThompsonAgent, Exp4Agent, FixedAgent>;

/// Builds a fresh agent for one episode of length `horizon` on the bundle.
AnyAgent make_agent(const InstanceBundle& bundle, const AgentKind& kind, std::int64_t horizon);

/// Draws an outcome index of (true model, action).
std::size_t sample_outcome(const ModelSpace& space, std::size_t model, std::size_t action, Rng& rng);

/// Core episode loop. `on_step(t, action, outcome, gap, agent)` is called after
/// each step with t starting at 1 and may return false to stop early.
/// Returns the number of steps executed.
template <class Agent, class OnStep>
std::int64_t run_loop(const ModelSpace& space, std::size_t true_model, Agent& agent,
                      std::int64_t horizon, Rng& rng, OnStep&& on_step) {
  const double best = space.mean(true_model, space.optimal_action(true_model));
  for (std::int64_t t = 1; t <= horizon; ++t) {
    const std::size_t action = agent.select(rng);
    const std::size_t outcome = sample_outcome(space, true_model, action, rng);
    agent.observe(action, outcome);
    const double gap = best - space.mean(true_model, action);
    if (!on_step(t, action, outcome, gap, agent)) return t;
  }
  return horizon;
}

/// One episode; identical arguments give a bit-identical trajectory.
Trajectory run_episode(const InstanceBundle& bundle, const AgentKind& kind, std::int64_t horizon,
                       std::uint64_t seed, bool record_posterior = false);

/// Cumulative pseudo-regret of one episode without recording steps. Consumes
/// the random stream exactly like run_episode.
double episode_regret(const InstanceBundle& bundle, const AgentKind& kind, std::int64_t horizon,
                      std::uint64_t seed);

/// Run k uses stream_seed(master_seed, k); the result does not depend on `workers`.
MonteCarloSummary monte_carlo(const InstanceBundle& bundle, const AgentKind& kind,
                              std::int64_t horizon, std::size_t runs, std::uint64_t master_seed,
                              unsigned workers = 0);

/// Mean and standard error of a sample, reduced in index order.
MonteCarloSummary summarize(std::vector<double> per_run);

/// Prior-weighted average of frequentist regrets, one Monte Carlo per model.
double bayes_regret(const ModelSpace& space, const BeliefState& prior, const AgentKind& kind,
                    std::int64_t horizon, std::size_t runs_per_model, std::uint64_t master_seed,
                    unsigned workers = 0);

}  // namespace priorsense
