#include "cmpg/generators.hpp"

#include <cmath>

#include "cmpg/error.hpp"

namespace cmpg {

namespace {

Rational frac(long p, long q) { return Rational(BigInt(p), BigInt(q)); }

}  // namespace

SqrtParameters sqrt_parameters(std::int64_t b) {
  if (b < 1) throw PreconditionError("gen sqrt needs b >= 1");
  if (b == 1 || b == 4) return {Rational(b == 1 ? 1 : 2), Rational(0)};
  if (b == 2) return {frac(3, 2), frac(1, 3)};
  long k = static_cast<long>(std::sqrt(static_cast<double>(b)));
  while (static_cast<std::int64_t>(k) * k > b) --k;
  while (static_cast<std::int64_t>(k) * k <= b) ++k;
  const Rational kr(k);
  return {kr, Rational(2) * kr - Rational(2) * Rational(static_cast<long>(b)) / kr};
}

Game gen_sqrt_game(std::int64_t b) {
  const SqrtParameters p = sqrt_parameters(b);
  GameBuilder builder;
  if (b == 1 || b == 4) {
    builder.add_state("u", {"a"}, {"b"});
    builder.set("u", "a", "b", p.k, {{"u", Rational(1)}});
    builder.reward_scale(p.k);
    return builder.build();
  }
  const Rational stay = p.d / p.k;
  builder.add_state("u", {"a1", "a2"}, {"b1", "b2"});
  builder.add_state("w", {"a"}, {"b"});
  builder.set("u", "a1", "b1", p.k, {{"u", stay}, {"w", Rational(1) - stay}});
  builder.set("u", "a1", "b2", p.k - p.d, {{"w", Rational(1)}});
  builder.set("u", "a2", "b1", p.k - p.d, {{"w", Rational(1)}});
  builder.set("u", "a2", "b2", p.k, {{"w", Rational(1)}});
  builder.set("w", "a", "b", p.k, {{"u", Rational(1)}});
  builder.reward_scale(p.k);
  return builder.build();
}

Game gen_sqrt_sum(const std::vector<std::int64_t>& nums, SqrtEntry entry) {
  if (nums.empty()) throw PreconditionError("gen sqrtsum needs at least one number");
  const long len = static_cast<long>(nums.size());
  GameBuilder builder;
  builder.add_state("s*", {"a"}, {"b"});
  std::vector<std::pair<std::string, Rational>> start;
  Rational scale(0);
  for (std::size_t i = 0; i < nums.size(); ++i) {
    const Game copy = gen_sqrt_game(nums[i]);
    const std::string prefix = "g" + std::to_string(i) + ".";
    for (StateIndex s = 0; s < copy.num_states(); ++s) {
      builder.add_state(prefix + copy.state_name(s), copy.actions1(s), copy.actions2(s));
    }
    for (StateIndex s = 0; s < copy.num_states(); ++s) {
      for (ActionIndex a1 = 0; a1 < copy.num_actions1(s); ++a1) {
        for (ActionIndex a2 = 0; a2 < copy.num_actions2(s); ++a2) {
          const Transition& t = copy.transition(s, a1, a2);
          std::vector<std::pair<std::string, Rational>> succ;
          for (const Successor& x : t.successors) succ.emplace_back(prefix + copy.state_name(x.state), x.probability);
          builder.set(prefix + copy.state_name(s), copy.actions1(s)[a1], copy.actions2(s)[a2], t.reward, succ);
        }
      }
    }
    const bool has_w = copy.find_state("w").has_value();
    const std::string target = prefix + (entry == SqrtEntry::W && has_w ? "w" : "u");
    start.emplace_back(target, frac(1, len));
    scale = std::max(scale, copy.reward_scale());
  }
  builder.set("s*", "a", "b", Rational(0), start);
  builder.reward_scale(scale);
  return builder.build();
}

LowerBoundGame gen_lower_bound(int k, const Rational& eta) {
  if (k < 2) throw PreconditionError("gen lower-bound needs k >= 2");
  const Rational limit = frac(1, 4L * k + 4);
  if (eta.sign() <= 0 || eta >= limit) {
    throw PreconditionError("gen lower-bound needs 0 < eta < 1/(4k+4) = " + limit.str() + ", got " + eta.str());
  }
  const auto s_name = [](int y, bool bar) { return y == 0 ? std::string("a") : "s" + std::to_string(y) + (bar ? "bar" : ""); };

  GameBuilder builder;
  std::vector<std::string> names{"a", "b", "bbar", "c", "cbar"};
  for (int y = 1; y <= k; ++y) {
    names.push_back(s_name(y, false));
    names.push_back(s_name(y, true));
  }
  for (const std::string& s : names) {
    if (s == "c" || s == "cbar") {
      builder.add_state(s, {"i1", "i2"}, {"j1", "j2"});
    } else {
      builder.add_state(s, {"i1"}, {"j1"});
    }
  }

  std::vector<std::pair<std::string, Rational>> from_a{{"c", frac(1, 4)}, {"cbar", frac(1, 4)}};
  for (const std::string& s : names) {
    if (s != "a" && s != "c" && s != "cbar") from_a.emplace_back(s, frac(1, 4L * k + 4));
  }
  builder.set("a", "i1", "j1", frac(1, 2), from_a);
  builder.set("b", "i1", "j1", Rational(0), {{"a", Rational(1)}});
  builder.set("bbar", "i1", "j1", Rational(1), {{"a", Rational(1)}});
  for (int y = 1; y <= k; ++y) {
    for (const bool bar : {false, true}) {
      builder.set(s_name(y, bar), "i1", "j1", Rational(bar ? 1 : 0),
                  {{s_name(k, bar), Rational(1) - eta}, {s_name(y - 1, bar), eta}});
    }
  }
  const auto det = [](const std::string& to) { return std::vector<std::pair<std::string, Rational>>{{to, Rational(1)}}; };
  builder.set("c", "i1", "j1", Rational(0), det("bbar"));
  builder.set("c", "i2", "j2", Rational(0), det("bbar"));
  builder.set("c", "i1", "j2", Rational(0), det("b"));
  builder.set("c", "i2", "j1", Rational(0), det(s_name(k, false)));
  builder.set("cbar", "i1", "j1", Rational(1), det("b"));
  builder.set("cbar", "i2", "j2", Rational(1), det("b"));
  builder.set("cbar", "i2", "j1", Rational(1), det("bbar"));
  builder.set("cbar", "i1", "j2", Rational(1), det(s_name(k, true)));
  builder.reward_scale(Rational(1));

  LowerBoundGame out{builder.build(), {}};
  const Game& g = out.game;
  SkewSymmetryWitness& w = out.witness;
  const std::size_t n = g.num_states();
  w.state_map.resize(n);
  w.action1_map.resize(n);
  w.action2_map.resize(n);
  for (StateIndex s = 0; s < n; ++s) {
    std::string name = g.state_name(s);
    std::string image;
    if (name == "a") {
      image = "a";
    } else if (name.size() > 3 && name.ends_with("bar")) {
      image = name.substr(0, name.size() - 3);
    } else {
      image = name + "bar";
    }
    w.state_map[s] = g.state_index(image);
    // i_x <-> j_x at every state, which is the identity on positions.
    w.action1_map[s].resize(g.num_actions1(s));
    w.action2_map[s].resize(g.num_actions2(s));
    for (ActionIndex a = 0; a < g.num_actions1(s); ++a) w.action1_map[s][a] = a;
    for (ActionIndex a = 0; a < g.num_actions2(s); ++a) w.action2_map[s][a] = a;
  }
  return out;
}

StationaryStrategy lower_bound_sigma_star(const Game& g, int k, const Rational& eta) {
  const auto c = g.find_state("c");
  const auto cbar = g.find_state("cbar");
  if (!c || !cbar) throw PreconditionError("not a lower-bound game: states c and cbar are missing");
  if (k % 2 == 0) {
    const Rational p = Rational(2) * eta.pow(k / 2);
    std::vector<std::vector<Rational>> exact(g.num_states());
    for (StateIndex s = 0; s < g.num_states(); ++s) {
      exact[s].assign(g.num_actions1(s), Rational(0));
      exact[s][0] = Rational(1);
    }
    exact[*c] = {Rational(1) - p, p};
    exact[*cbar] = {p, Rational(1) - p};
    return StationaryStrategy::from_exact(1, std::move(exact));
  }
  const double p = 2.0 * std::pow(eta.to_double(), k / 2.0);
  StationaryStrategy out;
  out.player = 1;
  out.probabilities.resize(g.num_states());
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    out.probabilities[s].assign(g.num_actions1(s), 0.0);
    out.probabilities[s][0] = 1.0;
  }
  out.probabilities[*c] = {1.0 - p, p};
  out.probabilities[*cbar] = {p, 1.0 - p};
  return out;
}

}  // namespace cmpg
