#include <algorithm>

#include "cmpg/classify.hpp"
#include "cmpg/error.hpp"
#include "cmpg/generators.hpp"

namespace cmpg {

namespace {

bool is_absorbing(const Game& g, StateIndex s) {
  if (g.num_actions1(s) != 1 || g.num_actions2(s) != 1) return false;
  const auto& succ = g.transition(s, 0, 0).successors;
  return succ.size() == 1 && succ.front().state == s;
}

}  // namespace

SsgShape validate_ssg(const Game& g) {
  if (g.reward_scale() != Rational(1)) throw ValidationError("SSG must have reward_scale 1");
  std::optional<StateIndex> top, bottom;
  SsgShape shape{};
  const Rational half(BigInt(1), BigInt(2));
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    const std::string& name = g.state_name(s);
    if (is_absorbing(g, s)) {
      const Rational& r = g.transition(s, 0, 0).reward;
      auto& slot = r == Rational(1) ? top : bottom;
      if (r != Rational(1) && !r.is_zero()) throw ValidationError("terminal '" + name + "' must have reward 0 or 1");
      if (slot) throw ValidationError("SSG has more than one " + std::string(r.is_zero() ? "0" : "1") + " terminal");
      slot = s;
      continue;
    }
    if (g.num_actions1(s) > 1 && g.num_actions2(s) > 1) {
      throw ValidationError("SSG state '" + name + "' is not turn-based: both players have a choice");
    }
    for (ActionIndex a1 = 0; a1 < g.num_actions1(s); ++a1) {
      for (ActionIndex a2 = 0; a2 < g.num_actions2(s); ++a2) {
        const Transition& t = g.transition(s, a1, a2);
        if (!t.reward.is_zero()) throw ValidationError("SSG state '" + name + "' has a nonzero reward");
        for (const Successor& x : t.successors) {
          if (x.probability != half && x.probability != Rational(1)) {
            throw ValidationError("SSG state '" + name + "' uses probability " + x.probability.str() +
                                  " (only 1/2 and 1 are allowed)");
          }
        }
      }
    }
    shape.nonterminal.push_back(s);
  }
  if (!top || !bottom) throw ValidationError("SSG needs a 1 terminal and a 0 terminal");
  shape.top = *top;
  shape.bottom = *bottom;
  const StateSet trap = find_trap(g, shape.nonterminal);
  if (!trap.empty()) {
    throw ValidationError("SSG is not stopping: players can avoid the terminals forever from '" +
                          g.state_name(trap.front()) + "'");
  }
  return shape;
}

Game reduce_ssg(const Game& g, StateIndex s, int alpha, int beta) {
  const SsgShape shape = validate_ssg(g);
  if (s >= g.num_states()) throw PreconditionError("reduce-ssg: state out of range");
  if (alpha < 1 || beta < 1) throw PreconditionError("reduce-ssg needs alpha, beta >= 1");
  const long n = static_cast<long>(shape.nonterminal.size());
  const Rational leak = Rational(2).pow(-alpha);
  const Rational miss = Rational(2).pow(-beta);

  std::string fresh = "s'";
  while (g.find_state(fresh)) fresh += "'";

  GameBuilder builder;
  for (StateIndex x = 0; x < g.num_states(); ++x) builder.add_state(g.state_name(x), g.actions1(x), g.actions2(x));
  builder.add_state(fresh, {"a"}, {"b"});
  for (StateIndex x = 0; x < g.num_states(); ++x) {
    for (ActionIndex a1 = 0; a1 < g.num_actions1(x); ++a1) {
      for (ActionIndex a2 = 0; a2 < g.num_actions2(x); ++a2) {
        const Transition& t = g.transition(x, a1, a2);
        std::vector<std::pair<std::string, Rational>> succ;
        if (x == shape.top || x == shape.bottom) {
          succ = {{g.state_name(x), Rational(1) - leak}, {fresh, leak}};
        } else {
          for (const Successor& y : t.successors) succ.emplace_back(g.state_name(y.state), y.probability);
        }
        builder.set(g.state_name(x), g.actions1(x)[a1], g.actions2(x)[a2], t.reward, succ);
      }
    }
  }
  std::vector<std::pair<std::string, Rational>> restart{{g.state_name(s), Rational(1) - miss}};
  for (StateIndex x = 0; x < g.num_states(); ++x) {
    if (x != s) restart.emplace_back(g.state_name(x), miss / Rational(n + 1));
  }
  builder.set(fresh, "a", "b", Rational(0), restart);
  builder.reward_scale(Rational(1));
  return builder.build();
}

std::pair<Rational, Rational> reduction_interval(std::size_t n, const Rational& value, int alpha, int beta) {
  const long nl = static_cast<long>(n);
  if (alpha == 9 * nl && beta == 7 * nl) {
    const Rational r = Rational(2).pow(-7 * nl + 1);
    return {value - r, value + r};
  }
  const Rational stay = Rational(2).pow(alpha);
  const Rational kappa =
      stay * (Rational(1) - Rational(2).pow(-beta)) / (Rational(nl) * Rational(2).pow(nl) + stay + Rational(1));
  return {value * kappa, Rational(1) - (Rational(1) - value) * kappa};
}

}  // namespace cmpg
