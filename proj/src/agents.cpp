#include "priorsense/agents.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "priorsense/posterior.hpp"

namespace priorsense {

AgentKind AgentKind::parse(std::string_view text) {
  if (text == "ts") return ts();
  if (text == "exp4") return exp4();
  constexpr std::string_view prefix = "fixed:";
  if (text.starts_with(prefix)) {
    auto digits = text.substr(prefix.size());
    std::size_t action = 0;
    auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), action);
    if (ec == std::errc{} && end == digits.data() + digits.size() && !digits.empty()) {
      return fixed(action);
    }
  }
  throw std::invalid_argument(fmt::format("unknown agent '{}' (expected ts, exp4 or fixed:<idx>)", text));
}

std::string AgentKind::to_string() const {
  switch (type) {
    case Type::Ts:
      return "ts";
    case Type::Exp4:
      return "exp4";
    case Type::Fixed:
      return fmt::format("fixed:{}", fixed_action);
  }
  return "?";
}

std::size_t ts_select(std::span<const double> mass, const ModelSpace& space, Rng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t m = 0; m < mass.size(); ++m) {
    if (mass[m] <= 0.0) continue;
    last_positive = m;
    cumulative += mass[m];
    if (u < cumulative) return space.optimal_action(m);
  }
  // Rounding left u above the final partial sum.
  return space.optimal_action(last_positive);
}

std::size_t ts_select(const BeliefState& belief, const ModelSpace& space, Rng& rng) {
  return ts_select(belief.mass(), space, rng);
}

BeliefState ts_observe(const BeliefState& belief, std::size_t action, double reward,
                       const ModelSpace& space) {
  return bayes_update(belief, action, reward, space);
}

ThompsonAgent::ThompsonAgent(const ModelSpace& space, const BeliefState& prior)
    : space_(&space), mass_(prior.mass().begin(), prior.mass().end()) {
  if (prior.size() != space.model_count()) {
    throw std::invalid_argument("prior length does not match the model count");
  }
}

void ThompsonAgent::observe(std::size_t action, std::size_t outcome) {
  bayes_update_in_place(mass_, action, outcome, *space_);
}

double exp4_gamma(const BeliefState& prior, std::int64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("exp4_gamma needs T >= 1");
  const double raw = std::sqrt(entropy(prior) / static_cast<double>(horizon));
  return std::clamp(raw, kGammaFloor, 1.0 - kGammaFloor);
}

Exp4Agent::Exp4Agent(const ModelSpace& space, const BeliefState& prior, double gamma)
    : space_(&space), gamma_(gamma) {
  if (prior.size() != space.model_count()) {
    throw std::invalid_argument("prior length does not match the model count");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("EXP4 gamma must lie in (0,1)");
  log_weights_.reserve(prior.size());
  for (double w : prior.mass()) {
    if (!(w > 0.0)) throw std::invalid_argument("EXP4 needs strictly positive initial weights");
    log_weights_.push_back(std::log(w));
  }
}

std::vector<double> Exp4Agent::weights() const {
  std::vector<double> w;
  w.reserve(log_weights_.size());
  for (double lw : log_weights_) w.push_back(std::exp(lw));
  return w;
}

std::vector<double> Exp4Agent::action_probs() const {
  const std::size_t k = space_->action_count();
  const double top = *std::max_element(log_weights_.begin(), log_weights_.end());
  std::vector<double> advice(k, 0.0);
  double total = 0.0;
  for (std::size_t m = 0; m < log_weights_.size(); ++m) {
    const double w = std::exp(log_weights_[m] - top);
    advice[space_->optimal_action(m)] += w;
    total += w;
  }
  std::vector<double> probs(k);
  for (std::size_t i = 0; i < k; ++i) {
    probs[i] = (1.0 - gamma_) * advice[i] / total + gamma_ / static_cast<double>(k);
  }
  return probs;
}

namespace {

std::size_t sample_index(std::span<const double> probs, Rng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cumulative += probs[i];
    if (u < cumulative) return i;
  }
  return probs.size() - 1;
}

}  // namespace

std::size_t Exp4Agent::select(Rng& rng) const { return sample_index(action_probs(), rng); }

void Exp4Agent::update(std::size_t action, double reward, std::span<const double> probs) {
  const double k = static_cast<double>(space_->action_count());
  const double estimate = reward / probs[action];
  for (std::size_t m = 0; m < log_weights_.size(); ++m) {
    if (space_->optimal_action(m) == action) log_weights_[m] += gamma_ * estimate / k;
  }
  const double top = *std::max_element(log_weights_.begin(), log_weights_.end());
  for (double& lw : log_weights_) lw -= top;
  ++step_;
}

void Exp4Agent::observe(std::size_t action, std::size_t outcome) {
  update(action, space_->shared_support()[outcome], action_probs());
}

std::size_t Exp4Agent::step(Rng& rng, const std::function<double(std::size_t)>& reward_of) {
  const auto probs = action_probs();
  const std::size_t action = sample_index(probs, rng);
  update(action, reward_of(action), probs);
  return action;
}

FixedAgent::FixedAgent(std::size_t action, std::size_t action_count) : action_(action) {
  if (action >= action_count) {
    throw std::invalid_argument(fmt::format("fixed action {} out of range (K={})", action, action_count));
  }
}

}  // namespace priorsense
