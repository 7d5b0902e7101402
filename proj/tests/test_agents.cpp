#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "priorsense/agents.hpp"
#include "priorsense/posterior.hpp"

using namespace priorsense;

namespace {
Model bern_model(double a, double b) {
  return Model({RewardDistribution::bernoulli(a), RewardDistribution::bernoulli(b)});
}
}  // namespace

TEST_CASE("agent kind parsing") {
  CHECK(AgentKind::parse("ts") == AgentKind::ts());
  CHECK(AgentKind::parse("exp4") == AgentKind::exp4());
  CHECK(AgentKind::parse("fixed:1") == AgentKind::fixed(1));
  CHECK(AgentKind::parse("fixed:1").to_string() == "fixed:1");
  CHECK_THROWS_AS(AgentKind::parse("ucb"), std::invalid_argument);
  CHECK_THROWS_AS(AgentKind::parse("fixed:x"), std::invalid_argument);
}

TEST_CASE("ts_select with a point mass is deterministic") {
  const auto b = make_good_prior_instance(0.5, 8);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    CHECK(ts_select(BeliefState::point_mass(2, 0), b.space, rng) == 0);
    CHECK(ts_select(BeliefState::point_mass(2, 1), b.space, rng) == 1);
  }
  const ModelSpace same({bern_model(0.5, 0.5), bern_model(0.5, 0.5)});
  for (int i = 0; i < 100; ++i) CHECK(ts_select(BeliefState({0.5, 0.5}), same, rng) == 0);
}

TEST_CASE("ts_select frequencies match the optimal-action mass") {
  Rng rng(2);
  const ModelSpace space({bern_model(0.6, 0.5), bern_model(0.4, 0.5), bern_model(0.3, 0.7)});
  const BeliefState belief({0.2, 0.5, 0.3});
  const auto q = action_optimality_mass(belief, space);
  const int n = 100000;
  int zeros = 0;
  for (int i = 0; i < n; ++i) zeros += ts_select(belief, space, rng) == 0;
  const double freq = static_cast<double>(zeros) / n;
  const double se = std::sqrt(q[0] * (1 - q[0]) / n);
  CHECK(std::abs(freq - q[0]) <= 4 * se);

  const auto thm3 = make_good_prior_instance(0.7, 100);
  int first = 0;
  for (int i = 0; i < n; ++i) first += ts_select(thm3.prior, thm3.space, rng) == 0;
  CHECK(std::abs(static_cast<double>(first) / n - 0.7) <= 4 * std::sqrt(0.21 / n));
}

TEST_CASE("ts_observe delegates to bayes_update") {
  const ModelSpace space({bern_model(0.75, 0.5), bern_model(0.25, 0.5)});
  CHECK(ts_observe(BeliefState({0.5, 0.5}), 0, 1.0, space) == bayes_update(BeliefState({0.5, 0.5}), 0, 1.0, space));
}

TEST_CASE("exp4_gamma") {
  CHECK(exp4_gamma(BeliefState({0.5, 0.5}), static_cast<std::int64_t>(std::log(2.0) * 1e4)) ==
        doctest::Approx(0.01).epsilon(1e-3));
  CHECK(exp4_gamma(BeliefState::point_mass(2, 0), 100) == kGammaFloor);
  CHECK(exp4_gamma(BeliefState({0.5, 0.5}), 1) == doctest::Approx(std::sqrt(std::log(2.0))));
  CHECK(exp4_gamma(BeliefState::uniform(8), 1) == 1.0 - kGammaFloor);
}

TEST_CASE("exp4 action distribution") {
  const ModelSpace two({bern_model(0.6, 0.5), bern_model(0.4, 0.5)});
  CHECK(Exp4Agent(two, BeliefState({0.5, 0.5}), 0.5).action_probs() == std::vector<double>{0.5, 0.5});
  const ModelSpace agree({bern_model(0.6, 0.5), bern_model(0.7, 0.5)});
  const auto probs = Exp4Agent(agree, BeliefState({0.3, 0.7}), 0.2).action_probs();
  CHECK(probs[0] == doctest::Approx(1 - 0.2 + 0.1));
  const auto near_one = Exp4Agent(two, BeliefState({0.9, 0.1}), 1 - kGammaFloor).action_probs();
  CHECK(near_one[0] == doctest::Approx(0.5).epsilon(1e-5));
  CHECK_THROWS_AS(Exp4Agent(two, BeliefState({0.5, 0.5}), 0.0), std::invalid_argument);
}

TEST_CASE("exp4 update follows the exponential-weights rule") {
  const ModelSpace two({bern_model(0.6, 0.5), bern_model(0.4, 0.5)});
  Exp4Agent agent(two, BeliefState({0.5, 0.5}), 0.5);
  agent.observe(0, two.outcome_index(1.0));
  // pi(0) = 0.5, estimate 1/0.5 = 2, expert 0 gains 0.5 * 2 / 2 = 0.5 in log weight.
  const auto w = agent.weights();
  CHECK(w[0] / w[1] == doctest::Approx(std::exp(0.5)));
  CHECK(agent.step() == 1);
}

TEST_CASE("exp4 weights stay positive and finite over a long run") {
  const auto b = make_poor_prior_instance(0.01, 100000);
  Exp4Agent agent(b.space, b.prior, exp4_gamma(b.prior, 100000));
  Rng rng(4);
  for (int t = 0; t < 100000; ++t) {
    agent.step(rng, [&](std::size_t a) { return rng.uniform() < b.space.mean(0, a) ? 1.0 : 0.0; });
  }
  for (double w : agent.weights()) {
    CHECK(std::isfinite(w));
    CHECK(w > 0.0);
  }
  for (double lw : agent.log_weights()) CHECK(std::isfinite(lw));
}

TEST_CASE("fixed agent") {
  Rng rng(1);
  CHECK(FixedAgent(0, 2).select(rng) == 0);
  CHECK(fixed_select(FixedAgent(1, 2)) == 1);
  CHECK_THROWS_AS(FixedAgent(2, 2), std::invalid_argument);
}
