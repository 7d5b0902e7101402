#include "priorsense/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "priorsense/agents.hpp"
#include "priorsense/posterior.hpp"
#include "priorsense/sim_engine.hpp"

namespace priorsense {

bool sandwich_holds(double now, double next, double s) {
  constexpr double floor = std::numeric_limits<double>::min();
  return next >= now / s * (1.0 - 1e-12) - floor && next <= now * s * (1.0 + 1e-12) + floor;
}

double martingale_residual(const ModelSpace& space, const BeliefState& belief, std::size_t true_index) {
  if (belief.size() != space.model_count()) {
    throw std::invalid_argument("belief length does not match the model count");
  }
  if (true_index >= space.model_count()) throw std::invalid_argument("true model index out of range");
  const double p_true = belief[true_index];
  if (!(p_true > 0.0)) throw std::invalid_argument("martingale residual needs positive mass on the true model");

  const auto q = action_optimality_mass(belief, space);
  std::vector<double> next(belief.size());
  double expected_inverse = 0.0;
  for (std::size_t a = 0; a < space.action_count(); ++a) {
    if (q[a] == 0.0) continue;
    for (std::size_t x = 0; x < space.outcome_count(); ++x) {
      const double l_true = space.likelihood_at(true_index, a, x);
      if (l_true == 0.0) {
        for (std::size_t m = 0; m < space.model_count(); ++m) {
          if (belief[m] > 0.0 && space.likelihood_at(m, a, x) > 0.0) {
            throw std::invalid_argument(fmt::format(
                "model {} puts mass on reward {} of action {} where the true model has none",
                m, space.shared_support()[x], a));
          }
        }
        continue;
      }
      std::copy(belief.mass().begin(), belief.mass().end(), next.begin());
      bayes_update_in_place(next, a, x, space);
      expected_inverse += q[a] * l_true / next[true_index];
    }
  }
  return expected_inverse - 1.0 / p_true;
}

HittingReport hitting_times(std::span<const double> posterior_trace, double a, double b) {
  if (!(a > b)) throw std::invalid_argument(fmt::format("hitting thresholds need A > B (A={}, B={})", a, b));
  HittingReport report;
  report.a = a;
  report.b = b;
  for (std::size_t t = 0; t < posterior_trace.size(); ++t) {
    const double v = posterior_trace[t];
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("posterior trace value outside [0,1]");
    if (!report.tau_a && v >= a) report.tau_a = t + 1;
    if (!report.tau_b && v <= b) report.tau_b = t + 1;
  }
  return report;
}

HittingProbReport hitting_prob_check(const InstanceBundle& bundle, double a, double b,
                                     std::size_t runs, std::int64_t horizon_cap,
                                     std::uint64_t master_seed, unsigned workers) {
  validate(bundle);
  const std::size_t truth = bundle.true_model;
  const double p1 = bundle.prior[truth];
  if (!(a > p1 && p1 > b && b > 0.0)) {
    throw std::invalid_argument(
        fmt::format("hitting check needs A > p1 > B > 0 (A={}, p1={}, B={})", a, p1, b));
  }
  if (runs < 1 || horizon_cap < 1) throw std::invalid_argument("hitting check needs runs >= 1 and T_cap >= 1");

  enum Outcome : unsigned char { Neither, HitA, HitB };
  std::vector<unsigned char> outcome(runs, Neither);
  parallel_for(runs, workers, [&](std::size_t k) {
    ThompsonAgent agent(bundle.space, bundle.prior);
    Rng rng(stream_seed(master_seed, k));
    run_loop(bundle.space, truth, agent, horizon_cap, rng,
             [&](std::int64_t, std::size_t, std::size_t, double, const ThompsonAgent& ag) {
               const double p = ag.mass()[truth];
               if (p >= a) {
                 outcome[k] = HitA;
                 return false;
               }
               if (p <= b) {
                 outcome[k] = HitB;
                 return false;
               }
               return true;
             });
  });

  HittingProbReport r;
  r.runs = runs;
  for (auto o : outcome) {
    if (o == HitA) ++r.a_first;
    else if (o == HitB) ++r.b_first;
    else ++r.neither;
  }
  const double n = static_cast<double>(runs);
  r.q_ab = static_cast<double>(r.a_first) / n;
  r.q_ba = static_cast<double>(r.b_first) / n;
  r.non_hit_fraction = static_cast<double>(r.neither) / n;
  r.q_ba_se = std::sqrt(r.q_ba * (1.0 - r.q_ba) / n);
  r.bound_b = b / p1;
  r.bound_gap = (1.0 - p1) / (a - b);
  r.passed = r.q_ba <= std::min(r.bound_b, r.bound_gap) + 3.0 * r.q_ba_se;
  return r;
}

double lr_gap(double delta) {
  if (std::abs(delta) > std::sqrt(0.125)) {
    throw std::invalid_argument(fmt::format("lr_gap needs |delta| <= sqrt(1/8), got {}", delta));
  }
  const double hi = 0.5 + delta;
  const double lo = 0.5 - delta;
  // Outcome 1 has mass hi under l1 and lo under l2; outcome 0 the reverse.
  return hi * (hi / lo - 1.0) + lo * (lo / hi - 1.0);
}

KlMargin kl_mixture_margin(const RewardDistribution& nu1, const RewardDistribution& nu2, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0,1]");
  std::vector<double> support(nu1.support().begin(), nu1.support().end());
  support.insert(support.end(), nu2.support().begin(), nu2.support().end());
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  const auto a = nu1.on_support(support);
  const auto b = nu2.on_support(support);

  KlMargin out;
  for (std::size_t x = 0; x < support.size(); ++x) {
    const double p = a.probs()[x];
    if (p == 0.0) continue;
    const double mix = alpha * p + (1.0 - alpha) * b.probs()[x];
    if (mix == 0.0) {
      throw InfiniteKl(fmt::format("mixture has no mass at reward {} where nu1 does", support[x]));
    }
    out.kl += p * std::log(p / mix);
  }
  const double dmu = a.mean() - b.mean();
  out.bound = 0.5 * (1.0 - alpha) * (1.0 - alpha) * dmu * dmu;
  return out;
}

namespace {

DriftCheck make_check(std::string name, double lhs, double rhs, DriftCheck::Relation rel) {
  DriftCheck c{std::move(name), lhs, rhs, rel, false};
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  switch (rel) {
    case DriftCheck::Relation::GreaterEqual:
      c.satisfied = lhs >= rhs - kInequalityTolerance * scale;
      break;
    case DriftCheck::Relation::LessEqual:
      c.satisfied = lhs <= rhs + kInequalityTolerance * scale;
      break;
    case DriftCheck::Relation::Equal:
      c.satisfied = std::abs(lhs - rhs) <= kIdentityTolerance * scale;
      break;
  }
  return c;
}

}  // namespace

bool DriftReport::all_satisfied() const {
  return std::all_of(checks.begin(), checks.end(), [](const DriftCheck& c) { return c.satisfied; });
}

DriftReport drift_checks(const ModelSpace& space, const BeliefState& belief) {
  if (space.model_count() != 2) throw std::invalid_argument("drift checks need a two-model space");
  if (belief.size() != 2) throw std::invalid_argument("drift checks need a two-model belief");
  const double p1 = belief[0];
  const double p2 = belief[1];
  if (!(p1 > 0.0 && p2 > 0.0)) throw std::invalid_argument("drift checks need both models to carry mass");

  const auto q = action_optimality_mass(belief, space);
  const std::size_t k = space.action_count();

  // Per-action closed-form ingredients.
  std::vector<double> lr_minus_one(k, 0.0);  // E^{theta1}[l1/l2 - 1]
  std::vector<double> mean_gap_sq(k, 0.0);   // |mu_i(theta1) - mu_i(theta2)|^2
  std::vector<double> kl_mix(k, 0.0);        // KL(nu_i(theta1), p1 nu_i(theta1) + p2 nu_i(theta2))
  for (std::size_t i = 0; i < k; ++i) {
    const double dmu = space.mean(0, i) - space.mean(1, i);
    mean_gap_sq[i] = dmu * dmu;
    if (q[i] == 0.0) continue;
    for (std::size_t x = 0; x < space.outcome_count(); ++x) {
      const double l1 = space.likelihood_at(0, i, x);
      const double l2 = space.likelihood_at(1, i, x);
      if (l1 == 0.0) continue;
      if (l2 == 0.0) {
        throw std::invalid_argument(fmt::format(
            "drift checks need model 1 to have mass wherever model 0 does (action {}, reward {})", i,
            space.shared_support()[x]));
      }
      lr_minus_one[i] += l1 * (l1 / l2 - 1.0);
    }
    kl_mix[i] = kl_mixture_margin(space.model(0).action(i), space.model(1).action(i), p1).kl;
  }

  // Enumerate the next posterior directly through Bayes rule.
  double e_log = 0.0, e_p1 = 0.0, e_inv_p2 = 0.0;
  std::vector<double> next(2);
  for (std::size_t i = 0; i < k; ++i) {
    if (q[i] == 0.0) continue;
    for (std::size_t x = 0; x < space.outcome_count(); ++x) {
      const double l1 = space.likelihood_at(0, i, x);
      if (l1 == 0.0) continue;
      next = {p1, p2};
      bayes_update_in_place(next, i, x, space);
      const double w = q[i] * l1;
      e_log += w * std::log(next[0]);
      e_p1 += w * next[0];
      e_inv_p2 += w / next[1];
    }
  }

  double rhs_a = 0.0, kl_sum = 0.0, rhs_b = 0.0, rhs_c = 0.0, rhs_c_lower = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    rhs_a += 0.5 * q[i] * p2 * p2 * mean_gap_sq[i];
    kl_sum += q[i] * kl_mix[i];
    rhs_b += q[i] * p1 * p2 * lr_minus_one[i];
    rhs_c += q[i] * (p1 / p2) * lr_minus_one[i];
    rhs_c_lower += q[i] * (p1 / p2) * 0.5 * mean_gap_sq[i];
  }

  const double log_drift = e_log - std::log(p1);
  const double increment = e_p1 - p1;
  const double inverse_drift = e_inv_p2 - 1.0 / p2;

  using R = DriftCheck::Relation;
  DriftReport report;
  report.checks.push_back(make_check("a.kl_identity", log_drift, kl_sum, R::Equal));
  report.checks.push_back(make_check("a.log_drift_lower", log_drift, rhs_a, R::GreaterEqual));
  report.checks.push_back(make_check("b.submartingale", increment, 0.0, R::GreaterEqual));
  report.checks.push_back(make_check("b.increment_upper", increment, rhs_b, R::LessEqual));
  report.checks.push_back(make_check("c.inverse_identity", inverse_drift, rhs_c, R::Equal));
  report.checks.push_back(make_check("c.inverse_lower", inverse_drift, rhs_c_lower, R::GreaterEqual));
  return report;
}

InstanceBundle embed_general_instance(const InstanceBundle& two_model, std::size_t n_models,
                                      const BeliefState& general_prior) {
  validate(two_model);
  if (two_model.space.model_count() != 2) throw std::invalid_argument("embedding needs a two-model base instance");
  if (n_models < 2) throw std::invalid_argument("embedding needs N >= 2");
  if (general_prior.size() != n_models) throw std::invalid_argument("general prior length must equal N");
  double rest = 0.0;
  for (std::size_t j = 1; j < n_models; ++j) rest += general_prior[j];
  if (std::abs(general_prior[0] - two_model.prior[0]) > kIdentityTolerance ||
      std::abs(rest - two_model.prior[1]) > kIdentityTolerance) {
    throw std::invalid_argument(fmt::format(
        "embedding prior mismatch: first model {} vs {}, clones {} vs {}", general_prior[0],
        two_model.prior[0], rest, two_model.prior[1]));
  }
  std::vector<Model> models;
  models.reserve(n_models);
  models.push_back(two_model.space.model(0));
  for (std::size_t j = 1; j < n_models; ++j) models.push_back(two_model.space.model(1));
  return {ModelSpace(std::move(models)), general_prior, two_model.true_model == 0 ? 0u : 1u,
          two_model.delta};
}

}  // namespace priorsense
