#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "priorsense/belief.hpp"
#include "priorsense/model_space.hpp"
#include "priorsense/rng.hpp"

namespace priorsense {

/// Which strategy an episode runs. Parsed from "ts", "exp4" or "fixed:<idx>".
struct AgentKind {
  enum class Type { Ts, Exp4, Fixed };
  Type type = Type::Ts;
  std::size_t fixed_action = 0;

  static AgentKind ts() { return {Type::Ts, 0}; }
  static AgentKind exp4() { return {Type::Exp4, 0}; }
  static AgentKind fixed(std::size_t action) { return {Type::Fixed, action}; }

  static AgentKind parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const AgentKind&, const AgentKind&) = default;
};

/// Thompson Sampling: draw a model from the belief and play its optimal action.
std::size_t ts_select(std::span<const double> mass, const ModelSpace& space, Rng& rng);
std::size_t ts_select(const BeliefState& belief, const ModelSpace& space, Rng& rng);
BeliefState ts_observe(const BeliefState& belief, std::size_t action, double reward,
                       const ModelSpace& space);

class ThompsonAgent {
 public:
  ThompsonAgent(const ModelSpace& space, const BeliefState& prior);

  std::size_t select(Rng& rng) const { return ts_select(mass_, *space_, rng); }
  void observe(std::size_t action, std::size_t outcome);
  std::span<const double> mass() const noexcept { return mass_; }

 private:
  const ModelSpace* space_;
  std::vector<double> mass_;
};

/// sqrt(H(prior)/T) clipped to [kGammaFloor, 1 - kGammaFloor].
inline constexpr double kGammaFloor = 1e-6;
double exp4_gamma(const BeliefState& prior, std::int64_t horizon);

/// EXP4 with one expert per model. Each expert advises its model's optimal
/// action; initial weights are the prior. Weights are kept in log space and
/// shifted so the largest is 0 after every update.
class Exp4Agent {
 public:
  Exp4Agent(const ModelSpace& space, const BeliefState& prior, double gamma);

  double gamma() const noexcept { return gamma_; }
  std::int64_t step() const noexcept { return step_; }
  std::span<const double> log_weights() const noexcept { return log_weights_; }
  std::vector<double> weights() const;

  /// Mixed action distribution (1-gamma) * advice + gamma / K.
  std::vector<double> action_probs() const;

  std::size_t select(Rng& rng) const;
  void observe(std::size_t action, std::size_t outcome);

  /// Selects an action, obtains its reward from `reward_of` and updates.
  std::size_t step(Rng& rng, const std::function<double(std::size_t)>& reward_of);

 private:
  void update(std::size_t action, double reward, std::span<const double> probs);

  const ModelSpace* space_;
  double gamma_;
  std::vector<double> log_weights_;
  std::int64_t step_ = 0;
};

class FixedAgent {
 public:
  FixedAgent(std::size_t action, std::size_t action_count);
  std::size_t action() const noexcept { return action_; }
  std::size_t select(Rng&) const noexcept { return action_; }
  void observe(std::size_t, std::size_t) noexcept {}

 private:
  std::size_t action_;
};

inline std::size_t fixed_select(const FixedAgent& agent) noexcept { return agent.action(); }

}  // namespace priorsense
