#include "cmpg/game.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cmpg/error.hpp"

namespace cmpg {

namespace {

std::string pair_label(const std::string& s, const std::string& a1, const std::string& a2) {
  return "(" + s + ", " + a1 + ", " + a2 + ")";
}

}  // namespace

Game::Game(std::vector<std::string> states, std::vector<std::vector<std::string>> actions1,
           std::vector<std::vector<std::string>> actions2, std::vector<std::vector<Transition>> table,
           Rational reward_scale)
    : states_(std::move(states)),
      actions1_(std::move(actions1)),
      actions2_(std::move(actions2)),
      table_(std::move(table)),
      reward_scale_(std::move(reward_scale)) {
  for (StateIndex s = 0; s < states_.size(); ++s) {
    if (!state_lookup_.emplace(states_[s], s).second) {
      throw ValidationError("duplicate state identifier '" + states_[s] + "'");
    }
  }
  for (auto& row : table_) {
    for (auto& t : row) {
      std::sort(t.successors.begin(), t.successors.end(),
                [](const Successor& a, const Successor& b) { return a.state < b.state; });
    }
  }
  validate();
  reward_scale_double_ = reward_scale_.to_double();
  build_float_mirror();
}

void Game::validate() const {
  if (states_.empty()) throw ValidationError("game has no states");
  if (actions1_.size() != states_.size() || actions2_.size() != states_.size() ||
      table_.size() != states_.size()) {
    throw ValidationError("per-state tables do not match the state list");
  }
  if (reward_scale_.sign() <= 0) throw ValidationError("reward_scale must be positive");
  for (StateIndex s = 0; s < states_.size(); ++s) {
    if (actions1_[s].empty() || actions2_[s].empty()) {
      throw ValidationError("state '" + states_[s] + "' has an empty action set");
    }
    for (const auto* acts : {&actions1_[s], &actions2_[s]}) {
      std::vector<std::string> sorted = *acts;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ValidationError("state '" + states_[s] + "' declares a duplicate action");
      }
    }
    if (table_[s].size() != actions1_[s].size() * actions2_[s].size()) {
      throw ValidationError("state '" + states_[s] + "' is missing transitions");
    }
    for (ActionIndex a1 = 0; a1 < actions1_[s].size(); ++a1) {
      for (ActionIndex a2 = 0; a2 < actions2_[s].size(); ++a2) {
        const Transition& t = transition(s, a1, a2);
        const std::string label = pair_label(states_[s], actions1_[s][a1], actions2_[s][a2]);
        if (t.reward.sign() < 0 || t.reward > reward_scale_) {
          throw ValidationError("reward " + t.reward.str() + " at " + label + " outside [0, " +
                                reward_scale_.str() + "]");
        }
        if (t.successors.empty()) throw ValidationError("empty distribution at " + label);
        Rational total;
        for (std::size_t k = 0; k < t.successors.size(); ++k) {
          const Successor& succ = t.successors[k];
          if (succ.state >= states_.size()) throw ValidationError("unknown successor at " + label);
          if (k > 0 && t.successors[k - 1].state == succ.state) {
            throw ValidationError("duplicate successor at " + label);
          }
          if (succ.probability.sign() <= 0) {
            throw ValidationError("non-positive probability at " + label);
          }
          total += succ.probability;
        }
        if (total != Rational(1)) {
          throw ValidationError("distribution at " + label + " sums to " + total.str() + ", not 1");
        }
      }
    }
  }
}

void Game::build_float_mirror() {
  float_table_.resize(table_.size());
  for (StateIndex s = 0; s < table_.size(); ++s) {
    float_table_[s].resize(table_[s].size());
    for (std::size_t k = 0; k < table_[s].size(); ++k) {
      FloatTransition& f = float_table_[s][k];
      f.reward = table_[s][k].reward.to_double();
      for (const Successor& succ : table_[s][k].successors) {
        f.successors.emplace_back(succ.state, succ.probability.to_double());
      }
    }
  }
}

std::optional<StateIndex> Game::find_state(const std::string& name) const {
  const auto it = state_lookup_.find(name);
  if (it == state_lookup_.end()) return std::nullopt;
  return it->second;
}

StateIndex Game::state_index(const std::string& name) const {
  const auto s = find_state(name);
  if (!s) throw ValidationError("unknown state '" + name + "'");
  return *s;
}

std::optional<ActionIndex> Game::find_action1(StateIndex s, const std::string& name) const {
  const auto& acts = actions1_.at(s);
  const auto it = std::find(acts.begin(), acts.end(), name);
  if (it == acts.end()) return std::nullopt;
  return static_cast<ActionIndex>(it - acts.begin());
}

std::optional<ActionIndex> Game::find_action2(StateIndex s, const std::string& name) const {
  const auto& acts = actions2_.at(s);
  const auto it = std::find(acts.begin(), acts.end(), name);
  if (it == acts.end()) return std::nullopt;
  return static_cast<ActionIndex>(it - acts.begin());
}

// ---------------------------------------------------------------------------

GameBuilder& GameBuilder::add_state(const std::string& name, std::vector<std::string> actions1,
                                    std::vector<std::string> actions2) {
  if (!lookup_.emplace(name, states_.size()).second) {
    throw ValidationError("duplicate state identifier '" + name + "'");
  }
  PendingState st{name, std::move(actions1), std::move(actions2), {}};
  st.table.resize(st.actions1.size() * st.actions2.size());
  states_.push_back(std::move(st));
  return *this;
}

GameBuilder& GameBuilder::set(const std::string& state, const std::string& a1, const std::string& a2,
                              Rational reward,
                              const std::vector<std::pair<std::string, Rational>>& successors) {
  const auto it = lookup_.find(state);
  if (it == lookup_.end()) throw ValidationError("transition from undeclared state '" + state + "'");
  const PendingState& st = states_[it->second];
  const auto i1 = std::find(st.actions1.begin(), st.actions1.end(), a1);
  const auto i2 = std::find(st.actions2.begin(), st.actions2.end(), a2);
  if (i1 == st.actions1.end() || i2 == st.actions2.end()) {
    throw ValidationError("undeclared action in " + pair_label(state, a1, a2));
  }
  const std::size_t slot = static_cast<std::size_t>(i1 - st.actions1.begin()) * st.actions2.size() +
                           static_cast<std::size_t>(i2 - st.actions2.begin());
  edges_.push_back({it->second, slot, std::move(reward), successors});
  return *this;
}

GameBuilder& GameBuilder::reward_scale(Rational w) {
  reward_scale_ = std::move(w);
  return *this;
}

Game GameBuilder::build() const {
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> acts1, acts2;
  std::vector<std::vector<std::optional<Transition>>> slots;
  for (const PendingState& st : states_) {
    names.push_back(st.name);
    acts1.push_back(st.actions1);
    acts2.push_back(st.actions2);
    slots.push_back(st.table);
  }
  Rational max_reward;
  for (const PendingEdge& e : edges_) {
    const PendingState& st = states_[e.state];
    const std::size_t m2 = st.actions2.size();
    const std::string label = pair_label(st.name, st.actions1[e.slot / m2], st.actions2[e.slot % m2]);
    if (slots[e.state][e.slot]) throw ValidationError("duplicate transition entry " + label);
    Transition t{e.reward, {}};
    for (const auto& [target, p] : e.successors) {
      const auto it = lookup_.find(target);
      if (it == lookup_.end()) {
        throw ValidationError("successor '" + target + "' of " + label + " is undeclared");
      }
      t.successors.push_back({it->second, p});
    }
    max_reward = std::max(max_reward, e.reward);
    slots[e.state][e.slot] = std::move(t);
  }
  std::vector<std::vector<Transition>> table(states_.size());
  for (std::size_t s = 0; s < states_.size(); ++s) {
    const std::size_t m2 = acts2[s].size();
    for (std::size_t k = 0; k < slots[s].size(); ++k) {
      if (!slots[s][k]) {
        throw ValidationError("missing transition entry " +
                              pair_label(names[s], acts1[s][k / m2], acts2[s][k % m2]));
      }
      table[s].push_back(std::move(*slots[s][k]));
    }
  }
  Rational w = reward_scale_ ? *reward_scale_ : (max_reward.is_zero() ? Rational(1) : max_reward);
  return Game(std::move(names), std::move(acts1), std::move(acts2), std::move(table), std::move(w));
}

// ---------------------------------------------------------------------------

GameStats compute_stats(const Game& g) {
  GameStats st;
  st.n = g.num_states();
  st.delta_min = Rational(1);
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    st.m = std::max({st.m, g.num_actions1(s), g.num_actions2(s)});
    bool random = false;
    for (ActionIndex a1 = 0; a1 < g.num_actions1(s); ++a1) {
      for (ActionIndex a2 = 0; a2 < g.num_actions2(s); ++a2) {
        const Transition& t = g.transition(s, a1, a2);
        if (t.successors.size() >= 2) random = true;
        for (const Successor& succ : t.successors) st.delta_min = std::min(st.delta_min, succ.probability);
      }
    }
    if (random) ++st.r;
  }
  return st;
}

// ---------------------------------------------------------------------------

StationaryStrategy StationaryStrategy::positional(const Game& g, int player,
                                                  const std::vector<ActionIndex>& choice) {
  if (choice.size() != g.num_states()) throw PreconditionError("positional strategy has wrong length");
  std::vector<std::vector<Rational>> exact(g.num_states());
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    const std::size_t k = player == 1 ? g.num_actions1(s) : g.num_actions2(s);
    if (choice[s] >= k) throw PreconditionError("positional choice outside the action set");
    exact[s].assign(k, Rational(0));
    exact[s][choice[s]] = Rational(1);
  }
  return from_exact(player, std::move(exact));
}

StationaryStrategy StationaryStrategy::uniform(const Game& g, int player) {
  std::vector<std::vector<Rational>> exact(g.num_states());
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    const long k = static_cast<long>(player == 1 ? g.num_actions1(s) : g.num_actions2(s));
    exact[s].assign(static_cast<std::size_t>(k), Rational(BigInt(1), BigInt(k)));
  }
  return from_exact(player, std::move(exact));
}

StationaryStrategy StationaryStrategy::from_exact(int player, std::vector<std::vector<Rational>> exact) {
  StationaryStrategy out;
  out.player = player;
  out.probabilities.resize(exact.size());
  for (std::size_t s = 0; s < exact.size(); ++s) {
    for (const Rational& p : exact[s]) out.probabilities[s].push_back(p.to_double());
  }
  out.exact = std::move(exact);
  return out;
}

void validate_strategy(const Game& g, const StationaryStrategy& sigma) {
  if (sigma.player != 1 && sigma.player != 2) throw ValidationError("strategy player must be 1 or 2");
  if (sigma.probabilities.size() != g.num_states()) {
    throw ValidationError("strategy does not cover every state");
  }
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    const std::size_t k = sigma.player == 1 ? g.num_actions1(s) : g.num_actions2(s);
    const auto& d = sigma.probabilities[s];
    if (d.size() != k) {
      throw ValidationError("strategy at '" + g.state_name(s) + "' does not match the action set");
    }
    if (sigma.exact) {
      const auto& e = (*sigma.exact)[s];
      if (e.size() != k) throw ValidationError("exact strategy at '" + g.state_name(s) + "' has wrong size");
      Rational total;
      for (const Rational& p : e) {
        if (p.sign() < 0) throw ValidationError("negative probability at '" + g.state_name(s) + "'");
        total += p;
      }
      if (total != Rational(1)) {
        throw ValidationError("strategy at '" + g.state_name(s) + "' sums to " + total.str());
      }
    } else {
      double total = 0.0;
      for (double p : d) {
        if (!(p >= 0.0)) throw ValidationError("negative probability at '" + g.state_name(s) + "'");
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-12) {
        throw ValidationError("strategy at '" + g.state_name(s) + "' does not sum to 1");
      }
    }
  }
}

double expected_reward(const Game& g, StateIndex s, std::span<const double> d1, std::span<const double> d2) {
  if (d1.size() != g.num_actions1(s) || d2.size() != g.num_actions2(s)) {
    throw PreconditionError("distribution support outside the action set of '" + g.state_name(s) + "'");
  }
  double total = 0.0;
  for (ActionIndex a1 = 0; a1 < d1.size(); ++a1) {
    if (d1[a1] == 0.0) continue;
    for (ActionIndex a2 = 0; a2 < d2.size(); ++a2) {
      total += g.float_transition(s, a1, a2).reward * d1[a1] * d2[a2];
    }
  }
  return total;
}

Rational expected_reward(const Game& g, StateIndex s, std::span<const Rational> d1,
                         std::span<const Rational> d2) {
  if (d1.size() != g.num_actions1(s) || d2.size() != g.num_actions2(s)) {
    throw PreconditionError("distribution support outside the action set of '" + g.state_name(s) + "'");
  }
  Rational total;
  for (ActionIndex a1 = 0; a1 < d1.size(); ++a1) {
    if (d1[a1].is_zero()) continue;
    for (ActionIndex a2 = 0; a2 < d2.size(); ++a2) {
      total += g.transition(s, a1, a2).reward * d1[a1] * d2[a2];
    }
  }
  return total;
}

double patience(const StationaryStrategy& sigma) {
  if (sigma.exact) {
    Rational worst(1);
    for (const auto& d : *sigma.exact) {
      for (const Rational& p : d) {
        if (p.sign() > 0) worst = std::max(worst, p.inverse());
      }
    }
    return worst.to_double();
  }
  double worst = 1.0;
  for (const auto& d : sigma.probabilities) {
    for (double p : d) {
      if (p > 0.0) worst = std::max(worst, 1.0 / p);
    }
  }
  return worst;
}

}  // namespace cmpg
