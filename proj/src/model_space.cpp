#include "priorsense/model_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace priorsense {

RewardDistribution::RewardDistribution(std::vector<double> support, std::vector<double> probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
  if (support_.empty() || support_.size() != probs_.size()) {
    throw std::invalid_argument("reward distribution: support and probs must be non-empty and equal length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (!(support_[i] >= 0.0 && support_[i] <= 1.0)) {
      throw std::invalid_argument(fmt::format("reward distribution: support value {} outside [0,1]", support_[i]));
    }
    if (i > 0 && !(support_[i] > support_[i - 1])) {
      throw std::invalid_argument("reward distribution: support must be strictly increasing");
    }
    if (!(probs_[i] >= 0.0)) {
      throw std::invalid_argument("reward distribution: negative probability");
    }
    total += probs_[i];
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw std::invalid_argument(fmt::format("reward distribution: probabilities sum to {:.17g}", total));
  }
}

RewardDistribution RewardDistribution::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(fmt::format("bernoulli parameter {} outside [0,1]", p));
  }
  return RewardDistribution({0.0, 1.0}, {1.0 - p, p});
}

double RewardDistribution::mean() const noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) m += support_[i] * probs_[i];
  return m;
}

double RewardDistribution::mass_at(double reward) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), reward);
  if (it == support_.end() || *it != reward) {
    throw std::invalid_argument(fmt::format("reward {} is not a support point", reward));
  }
  return probs_[static_cast<std::size_t>(it - support_.begin())];
}

RewardDistribution RewardDistribution::on_support(std::span<const double> superset) const {
  std::vector<double> probs(superset.size(), 0.0);
  std::size_t j = 0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    while (j < superset.size() && superset[j] < support_[i]) ++j;
    if (j == superset.size() || superset[j] != support_[i]) {
      throw std::invalid_argument("on_support: target does not contain the original support");
    }
    probs[j] = probs_[i];
  }
  RewardDistribution out;
  out.support_.assign(superset.begin(), superset.end());
  out.probs_ = std::move(probs);
  return out;
}

Model::Model(std::vector<RewardDistribution> per_action) : per_action_(std::move(per_action)) {
  if (per_action_.empty()) throw std::invalid_argument("model needs at least one action");
  means_.reserve(per_action_.size());
  for (const auto& d : per_action_) means_.push_back(d.mean());
}

double action_mean(const Model& model, std::size_t action) {
  if (action >= model.action_count()) {
    throw std::invalid_argument(fmt::format("action {} out of range (K={})", action, model.action_count()));
  }
  return model.means()[action];
}

double likelihood(const Model& model, std::size_t action, double reward) {
  if (action >= model.action_count()) {
    throw std::invalid_argument(fmt::format("action {} out of range (K={})", action, model.action_count()));
  }
  return model.action(action).mass_at(reward);
}

std::size_t optimal_action(const Model& model) {
  auto means = model.means();
  return static_cast<std::size_t>(std::max_element(means.begin(), means.end()) - means.begin());
}

ModelSpace::ModelSpace(std::vector<Model> models) {
  if (models.empty()) throw std::invalid_argument("model space needs at least one model");
  action_count_ = models.front().action_count();
  if (action_count_ < 2) throw std::invalid_argument("model space needs K >= 2 actions");
  for (const auto& m : models) {
    if (m.action_count() != action_count_) {
      throw std::invalid_argument("model space: models disagree on the action count");
    }
    for (const auto& d : m.per_action()) {
      support_.insert(support_.end(), d.support().begin(), d.support().end());
    }
  }
  std::sort(support_.begin(), support_.end());
  support_.erase(std::unique(support_.begin(), support_.end()), support_.end());

  models_.reserve(models.size());
  for (auto& m : models) {
    std::vector<RewardDistribution> padded;
    padded.reserve(action_count_);
    for (const auto& d : m.per_action()) padded.push_back(d.on_support(support_));
    models_.emplace_back(std::move(padded));
  }

  table_.reserve(models_.size() * action_count_ * support_.size());
  for (const auto& m : models_) {
    for (std::size_t a = 0; a < action_count_; ++a) {
      auto probs = m.action(a).probs();
      table_.insert(table_.end(), probs.begin(), probs.end());
      means_.push_back(m.means()[a]);
    }
    best_.push_back(priorsense::optimal_action(m));
  }
}

std::size_t ModelSpace::outcome_index(double reward) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), reward);
  if (it == support_.end() || *it != reward) {
    throw std::invalid_argument(fmt::format("reward {} is not in the shared support", reward));
  }
  return static_cast<std::size_t>(it - support_.begin());
}

AssumptionViolated::AssumptionViolated(std::size_t action, double support_point)
    : std::runtime_error(fmt::format(
          "smoothness assumption violated: action {} reward {} has zero density under exactly one model",
          action, support_point)),
      action_(action),
      point_(support_point) {}

double smoothness_constant(const ModelSpace& space) {
  if (space.model_count() != 2) {
    throw std::invalid_argument("smoothness constant is defined for two-model spaces");
  }
  double s = 1.0;
  for (std::size_t a = 0; a < space.action_count(); ++a) {
    for (std::size_t x = 0; x < space.outcome_count(); ++x) {
      const double l1 = space.likelihood_at(0, a, x);
      const double l2 = space.likelihood_at(1, a, x);
      if (l1 == 0.0 && l2 == 0.0) continue;
      if (l1 == 0.0 || l2 == 0.0) throw AssumptionViolated(a, space.shared_support()[x]);
      s = std::max({s, l1 / l2, l2 / l1});
    }
  }
  return s;
}

void validate(const InstanceBundle& bundle) {
  if (bundle.prior.size() != bundle.space.model_count()) {
    throw std::invalid_argument("prior length does not match the model count");
  }
  if (bundle.true_model >= bundle.space.model_count()) {
    throw std::invalid_argument("true model index out of range");
  }
}

namespace {

Model bernoulli_model(std::initializer_list<double> params) {
  std::vector<RewardDistribution> laws;
  for (double p : params) laws.push_back(RewardDistribution::bernoulli(p));
  return Model(std::move(laws));
}

void check_prior_mass(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument(fmt::format("prior mass {} outside (0,1)", p));
  }
}

void check_gap(double delta) {
  if (!(delta > 0.0 && delta < 0.5)) {
    throw std::invalid_argument(fmt::format("gap {} outside (0,1/2)", delta));
  }
}

}  // namespace

InstanceBundle poor_prior_instance_with_gap(double p, double delta) {
  check_prior_mass(p);
  check_gap(delta);
  ModelSpace space({bernoulli_model({0.5 + delta, 0.5}), bernoulli_model({0.5 - delta, 0.5})});
  return {std::move(space), BeliefState({p, 1.0 - p}), 0, delta};
}

InstanceBundle good_prior_instance_with_gap(double p, double delta) {
  check_prior_mass(p);
  check_gap(delta);
  ModelSpace space({bernoulli_model({0.5, 0.5 - delta}), bernoulli_model({0.5, 0.5 + delta})});
  return {std::move(space), BeliefState({p, 1.0 - p}), 0, delta};
}

InstanceBundle make_poor_prior_instance(double p, std::int64_t horizon) {
  check_prior_mass(p);
  if (static_cast<double>(horizon) < 1.0 / p) {
    throw std::invalid_argument(fmt::format("poor-prior instance needs T >= 1/p (T={}, p={})", horizon, p));
  }
  return poor_prior_instance_with_gap(p, 1.0 / std::sqrt(8.0 * p * static_cast<double>(horizon)));
}

InstanceBundle make_good_prior_instance(double p, std::int64_t horizon) {
  check_prior_mass(p);
  if (static_cast<double>(horizon) < 1.0 / (1.0 - p)) {
    throw std::invalid_argument(
        fmt::format("good-prior instance needs T >= 1/(1-p) (T={}, p={})", horizon, p));
  }
  return good_prior_instance_with_gap(p, std::sqrt(1.0 / (8.0 * (1.0 - p) * static_cast<double>(horizon))));
}

InstanceBundle make_scaling_instance(std::size_t n_models, double delta, PriorCase which, Rng& rng) {
  if (n_models < 2) throw std::invalid_argument("scaling instance needs N >= 2");
  // Largest parameter used is 1/2 + 3 delta/2.
  if (!(delta > 0.0 && 0.5 + 1.5 * delta < 1.0)) {
    throw std::invalid_argument(fmt::format("scaling gap {} pushes a Bernoulli parameter outside (0,1)", delta));
  }
  std::vector<Model> models;
  models.reserve(n_models);
  if (which == PriorCase::Poor) {
    models.push_back(bernoulli_model({0.5 + delta, 0.5}));
  } else {
    models.push_back(bernoulli_model({0.5, 0.5 - delta}));
  }
  for (std::size_t j = 1; j < n_models; ++j) {
    const double d = n_models == 2 ? delta : delta * (0.5 + rng.uniform());
    if (which == PriorCase::Poor) {
      models.push_back(bernoulli_model({0.5 - d, 0.5}));
    } else {
      models.push_back(bernoulli_model({0.5, 0.5 + d}));
    }
  }
  ModelSpace space(std::move(models));
  return {std::move(space), BeliefState::uniform(n_models), 0, delta};
}

}  // namespace priorsense
