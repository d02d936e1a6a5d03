#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cmpg/rational.hpp"

namespace cmpg {

using StateIndex = std::size_t;
using ActionIndex = std::size_t;

// One entry of a transition distribution, exact.
struct Successor {
  StateIndex state;
  Rational probability;
};

// Outcome of an action pair: reward and successor distribution. Successors
// are sorted by state index, probabilities are positive.
struct Transition {
  Rational reward;
  std::vector<Successor> successors;
};

// Double-precision mirror of a Transition used by the iterative solvers.
struct FloatTransition {
  double reward = 0.0;
  std::vector<std::pair<StateIndex, double>> successors;
};

// Finite concurrent mean-payoff game. Identifiers are kept as strings for
// I/O; every algorithm works on dense indices. A constructed Game is always
// valid: distributions sum exactly to 1, rewards lie in [0, W], and every
// action pair of every state has exactly one transition.
class Game {
 public:
  // table[s][a1 * |actions2[s]| + a2]
  Game(std::vector<std::string> states, std::vector<std::vector<std::string>> actions1,
       std::vector<std::vector<std::string>> actions2, std::vector<std::vector<Transition>> table,
       Rational reward_scale);

  std::size_t num_states() const { return states_.size(); }
  const std::vector<std::string>& states() const { return states_; }
  const std::string& state_name(StateIndex s) const { return states_.at(s); }
  std::optional<StateIndex> find_state(const std::string& name) const;
  StateIndex state_index(const std::string& name) const;  // throws ValidationError

  std::size_t num_actions1(StateIndex s) const { return actions1_[s].size(); }
  std::size_t num_actions2(StateIndex s) const { return actions2_[s].size(); }
  const std::vector<std::string>& actions1(StateIndex s) const { return actions1_.at(s); }
  const std::vector<std::string>& actions2(StateIndex s) const { return actions2_.at(s); }
  std::optional<ActionIndex> find_action1(StateIndex s, const std::string& name) const;
  std::optional<ActionIndex> find_action2(StateIndex s, const std::string& name) const;

  const Transition& transition(StateIndex s, ActionIndex a1, ActionIndex a2) const {
    return table_[s][a1 * actions2_[s].size() + a2];
  }
  const FloatTransition& float_transition(StateIndex s, ActionIndex a1, ActionIndex a2) const {
    return float_table_[s][a1 * actions2_[s].size() + a2];
  }

  const Rational& reward_scale() const { return reward_scale_; }
  double reward_scale_double() const { return reward_scale_double_; }

 private:
  void validate() const;
  void build_float_mirror();

  std::vector<std::string> states_;
  std::vector<std::vector<std::string>> actions1_;
  std::vector<std::vector<std::string>> actions2_;
  std::vector<std::vector<Transition>> table_;
  std::vector<std::vector<FloatTransition>> float_table_;
  std::unordered_map<std::string, StateIndex> state_lookup_;
  Rational reward_scale_;
  double reward_scale_double_ = 1.0;
};

// Incremental, name-based construction of a Game; used by generators and
// tests. build() validates.
class GameBuilder {
 public:
  GameBuilder& add_state(const std::string& name, std::vector<std::string> actions1,
                         std::vector<std::string> actions2);
  GameBuilder& set(const std::string& state, const std::string& a1, const std::string& a2,
                   Rational reward, const std::vector<std::pair<std::string, Rational>>& successors);
  GameBuilder& reward_scale(Rational w);
  Game build() const;

 private:
  struct PendingState {
    std::string name;
    std::vector<std::string> actions1;
    std::vector<std::string> actions2;
    std::vector<std::optional<Transition>> table;
  };
  struct PendingEdge {
    std::size_t state;
    std::size_t slot;
    Rational reward;
    std::vector<std::pair<std::string, Rational>> successors;
  };
  std::vector<PendingState> states_;
  std::vector<PendingEdge> edges_;
  std::unordered_map<std::string, std::size_t> lookup_;
  std::optional<Rational> reward_scale_;
};

struct GameStats {
  std::size_t n = 0;  // states
  std::size_t m = 0;  // max actions of either player at any state
  std::size_t r = 0;  // states where some action pair has support size >= 2
  Rational delta_min;  // smallest positive transition probability
};

GameStats compute_stats(const Game& g);

// Per-state distribution over one player's actions. Float probabilities are
// always present; exact probabilities additionally when the strategy is
// rational-tagged (q-rounded strategies, strategies read from "p/q" files).
struct StationaryStrategy {
  int player = 1;
  std::vector<std::vector<double>> probabilities;
  std::optional<std::vector<std::vector<Rational>>> exact;

  bool is_exact() const { return exact.has_value(); }
  const std::vector<double>& at(StateIndex s) const { return probabilities.at(s); }

  static StationaryStrategy positional(const Game& g, int player, const std::vector<ActionIndex>& choice);
  static StationaryStrategy uniform(const Game& g, int player);
  static StationaryStrategy from_exact(int player, std::vector<std::vector<Rational>> exact);
};

// Checks support and normalisation against g (exactly when rational-tagged,
// within 1e-12 otherwise). Throws ValidationError.
void validate_strategy(const Game& g, const StationaryStrategy& sigma);

// sum_{a1,a2} R(s,a1,a2) d1(a1) d2(a2), unnormalised reward units.
double expected_reward(const Game& g, StateIndex s, std::span<const double> d1, std::span<const double> d2);
Rational expected_reward(const Game& g, StateIndex s, std::span<const Rational> d1,
                         std::span<const Rational> d2);

// Largest inverse probability of a supported action; 1 for positional strategies.
double patience(const StationaryStrategy& sigma);

}  // namespace cmpg
