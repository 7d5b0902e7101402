#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "priorsense/model_space.hpp"

using namespace priorsense;

namespace {
Model bern_model(double a, double b) {
  return Model({RewardDistribution::bernoulli(a), RewardDistribution::bernoulli(b)});
}
const RewardDistribution three_point({0.0, 0.5, 1.0}, {0.2, 0.3, 0.5});
}  // namespace

TEST_CASE("reward distribution invariants") {
  CHECK_THROWS_AS(RewardDistribution({0.0, 1.0}, {0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(RewardDistribution({1.0, 0.0}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(RewardDistribution({0.0, 1.5}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(RewardDistribution({0.0, 1.0}, {-0.1, 1.1}), std::invalid_argument);
  CHECK_THROWS_AS(RewardDistribution({0.0}, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("action_mean") {
  const Model m({RewardDistribution::bernoulli(0.75), RewardDistribution({0.0, 1.0}, {0.5, 0.5}), three_point});
  CHECK(action_mean(m, 0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(action_mean(m, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(action_mean(m, 2) - 0.65) < 1e-15);
  CHECK_THROWS_AS(action_mean(m, 3), std::invalid_argument);
}

TEST_CASE("likelihood") {
  const Model m({RewardDistribution::bernoulli(0.75), three_point});
  CHECK(likelihood(m, 0, 1.0) == 0.75);
  CHECK(likelihood(m, 0, 0.0) == 0.25);
  CHECK(likelihood(m, 1, 0.5) == 0.3);
  CHECK_THROWS_AS(likelihood(m, 1, 0.25), std::invalid_argument);
}

TEST_CASE("optimal_action ties go to the lowest index") {
  CHECK(optimal_action(bern_model(0.55, 0.5)) == 0);
  CHECK(optimal_action(bern_model(0.5, 0.5)) == 0);
  const auto thm3 = make_good_prior_instance(0.5, 8);
  CHECK(optimal_action(thm3.space.model(1)) == 1);
}

TEST_CASE("shared support pads with zeros") {
  const ModelSpace space({Model({RewardDistribution::bernoulli(0.5), three_point}),
                          Model({three_point, RewardDistribution::bernoulli(0.4)})});
  REQUIRE(space.outcome_count() == 3);
  CHECK(space.likelihood_at(0, 0, 1) == 0.0);
  CHECK(space.likelihood_at(1, 1, 2) == doctest::Approx(0.4));
  CHECK(space.outcome_index(0.5) == 1);
  CHECK_THROWS_AS(space.outcome_index(0.3), std::invalid_argument);
}

TEST_CASE("model space rejects mismatched action counts") {
  CHECK_THROWS_AS(ModelSpace({bern_model(0.5, 0.5), Model({RewardDistribution::bernoulli(0.5)})}),
                  std::invalid_argument);
}

TEST_CASE("smoothness_constant") {
  CHECK(smoothness_constant(ModelSpace({bern_model(0.3, 0.6), bern_model(0.3, 0.6)})) == 1.0);
  const double s = smoothness_constant(ModelSpace({bern_model(0.55, 0.5), bern_model(0.45, 0.5)}));
  CHECK(s == doctest::Approx(11.0 / 9.0).epsilon(1e-14));
  const ModelSpace bad({bern_model(1.0, 0.5), bern_model(0.5, 0.5)});
  try {
    smoothness_constant(bad);
    FAIL("expected AssumptionViolated");
  } catch (const AssumptionViolated& e) {
    CHECK(e.action() == 0);
    CHECK(e.support_point() == 0.0);
  }
  CHECK_THROWS_AS(smoothness_constant(ModelSpace({bern_model(.5, .5), bern_model(.5, .5), bern_model(.5, .5)})),
                  std::invalid_argument);
}

TEST_CASE("poor-prior instance") {
  const auto b = make_poor_prior_instance(0.01, 10000);
  CHECK(b.delta == doctest::Approx(1.0 / std::sqrt(800.0)).epsilon(1e-15));
  CHECK(std::abs(b.delta - 0.0353553) < 1e-7);
  CHECK(std::abs(b.space.mean(0, 0) - (0.5 + b.delta)) < 1e-15);
  CHECK(std::abs(b.space.mean(1, 0) - (0.5 - b.delta)) < 1e-15);
  CHECK(b.space.mean(0, 1) == 0.5);
  CHECK(b.space.mean(1, 1) == 0.5);
  CHECK(b.prior[0] == 0.01);
  CHECK(b.true_model == 0);
  CHECK(b.space.optimal_action(0) == 0);
  CHECK(b.space.optimal_action(1) == 1);
  CHECK(smoothness_constant(b.space) == doctest::Approx((0.5 + b.delta) / (0.5 - b.delta)).epsilon(1e-14));
  CHECK(make_poor_prior_instance(0.5, 2).delta == doctest::Approx(1.0 / std::sqrt(8.0)));
  CHECK_THROWS_AS(make_poor_prior_instance(0.01, 50), std::invalid_argument);
}

TEST_CASE("good-prior instance") {
  const auto b = make_good_prior_instance(0.999, 10000);
  CHECK(b.delta == doctest::Approx(1.0 / std::sqrt(80.0)).epsilon(1e-12));
  CHECK(std::abs(b.delta - 0.111803) < 1e-6);
  CHECK(b.space.mean(0, 0) == 0.5);
  CHECK(std::abs(b.space.mean(0, 1) - (0.5 - b.delta)) < 1e-15);
  CHECK(std::abs(b.space.mean(1, 1) - (0.5 + b.delta)) < 1e-15);
  CHECK(b.space.optimal_action(0) == 0);
  CHECK(b.space.optimal_action(1) == 1);
  CHECK(make_good_prior_instance(0.5, 2).delta == doctest::Approx(1.0 / std::sqrt(8.0)));
  CHECK_THROWS_AS(make_good_prior_instance(0.999, 500), std::invalid_argument);
}

TEST_CASE("scaling instances") {
  Rng rng(11);
  const auto poor = make_scaling_instance(2, 0.05, PriorCase::Poor, rng);
  CHECK(poor.space.mean(0, 0) == doctest::Approx(0.55));
  CHECK(poor.space.mean(0, 1) == 0.5);
  CHECK(poor.space.optimal_action(0) == 0);
  CHECK(poor.space.optimal_action(1) == 1);

  const auto good = make_scaling_instance(5, 0.05, PriorCase::Good, rng);
  REQUIRE(good.space.model_count() == 5);
  CHECK(good.space.optimal_action(0) == 0);
  for (std::size_t m = 1; m < 5; ++m) {
    CHECK(good.space.optimal_action(m) == 1);
    const double d = good.space.mean(m, 1) - 0.5;
    CHECK(d >= 0.025);
    CHECK(d <= 0.075);
  }
  CHECK(good.space.mean(1, 1) != good.space.mean(2, 1));

  for (int i = 0; i < 50; ++i) {
    const auto wide = make_scaling_instance(5, 0.3, PriorCase::Poor, rng);
    for (std::size_t m = 0; m < 5; ++m) {
      for (std::size_t a = 0; a < 2; ++a) {
        CHECK(wide.space.mean(m, a) > 0.0);
        CHECK(wide.space.mean(m, a) < 1.0);
      }
    }
  }
  CHECK_THROWS_AS(make_scaling_instance(5, 0.4, PriorCase::Poor, rng), std::invalid_argument);
}

TEST_CASE("scaling instances are reproducible from the seed") {
  Rng a(5), b(5);
  const auto x = make_scaling_instance(5, 0.05, PriorCase::Poor, a);
  const auto y = make_scaling_instance(5, 0.05, PriorCase::Poor, b);
  for (std::size_t m = 0; m < 5; ++m) CHECK(x.space.mean(m, 1) == y.space.mean(m, 1));
}

TEST_CASE("bundle validation") {
  auto b = make_poor_prior_instance(0.3, 100);
  CHECK_NOTHROW(validate(b));
  b.true_model = 2;
  CHECK_THROWS_AS(validate(b), std::invalid_argument);
  b.true_model = 0;
  b.prior = BeliefState::uniform(3);
  CHECK_THROWS_AS(validate(b), std::invalid_argument);
}
