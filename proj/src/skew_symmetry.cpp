#include <algorithm>
#include <sstream>

#include "cmpg/error.hpp"
#include "cmpg/generators.hpp"
#include "json.hpp"

namespace cmpg {

namespace {

using Json = nlohmann::ordered_json;

void check_bijection(const std::vector<ActionIndex>& map, std::size_t domain, std::size_t codomain,
                     const std::string& what) {
  if (map.size() != domain) throw ValidationError(what + " is not total");
  if (domain != codomain) throw ValidationError(what + " cannot be a bijection (action counts differ)");
  std::vector<bool> hit(codomain, false);
  for (ActionIndex a : map) {
    if (a >= codomain) throw ValidationError(what + " maps outside the target action set");
    if (hit[a]) throw ValidationError(what + " is not injective");
    hit[a] = true;
  }
}

std::string triple(const Game& g, StateIndex s, ActionIndex a1, ActionIndex a2) {
  return "(" + g.state_name(s) + ", " + g.actions1(s)[a1] + ", " + g.actions2(s)[a2] + ")";
}

}  // namespace

SkewCheck check_skew_symmetric(const Game& g, const SkewSymmetryWitness& w) {
  const std::size_t n = g.num_states();
  if (w.state_map.size() != n || w.action1_map.size() != n || w.action2_map.size() != n) {
    throw ValidationError("witness maps are not total on the states");
  }
  for (StateIndex s = 0; s < n; ++s) {
    if (w.state_map[s] >= n) throw ValidationError("state map leaves the state set at '" + g.state_name(s) + "'");
  }
  for (StateIndex s = 0; s < n; ++s) {
    if (w.state_map[w.state_map[s]] != s) {
      throw ValidationError("state map is not an involution at '" + g.state_name(s) + "'");
    }
    const StateIndex fs = w.state_map[s];
    check_bijection(w.action1_map[s], g.num_actions1(s), g.num_actions2(fs), "f1 at '" + g.state_name(s) + "'");
    check_bijection(w.action2_map[s], g.num_actions2(s), g.num_actions1(fs), "f2 at '" + g.state_name(s) + "'");
  }

  const Rational& scale = g.reward_scale();
  for (StateIndex s = 0; s < n; ++s) {
    const StateIndex fs = w.state_map[s];
    for (ActionIndex i = 0; i < g.num_actions1(s); ++i) {
      for (ActionIndex j = 0; j < g.num_actions2(s); ++j) {
        const ActionIndex jbar = w.action2_map[s][j], ibar = w.action1_map[s][i];
        const Rational lhs = g.transition(s, i, j).reward / scale;
        const Rational rhs = Rational(1) - g.transition(fs, jbar, ibar).reward / scale;
        if (lhs != rhs) {
          return {false, 1,
                  "condition (1) fails at " + triple(g, s, i, j) + ": normalised reward " + lhs.str() +
                      " but 1 - R" + triple(g, fs, jbar, ibar) + " = " + rhs.str()};
        }
      }
    }
  }
  for (StateIndex s = 0; s < n; ++s) {
    const StateIndex fs = w.state_map[s];
    for (ActionIndex i = 0; i < g.num_actions1(s); ++i) {
      for (ActionIndex j = 0; j < g.num_actions2(s); ++j) {
        const ActionIndex jbar = w.action2_map[s][j], ibar = w.action1_map[s][i];
        std::vector<std::pair<StateIndex, Rational>> image;
        for (const Successor& x : g.transition(s, i, j).successors) image.emplace_back(w.state_map[x.state], x.probability);
        std::sort(image.begin(), image.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        const auto& mirror = g.transition(fs, jbar, ibar).successors;
        const bool same = image.size() == mirror.size() &&
                          std::equal(image.begin(), image.end(), mirror.begin(), [](const auto& a, const Successor& b) {
                            return a.first == b.state && a.second == b.probability;
                          });
        if (!same) {
          return {false, 2,
                  "condition (2) fails: the distribution at " + triple(g, s, i, j) +
                      " does not mirror the one at " + triple(g, fs, jbar, ibar)};
        }
      }
    }
  }
  for (StateIndex s = 0; s < n; ++s) {
    const StateIndex fs = w.state_map[s];
    for (ActionIndex i = 0; i < g.num_actions1(s); ++i) {
      if (w.action2_map[fs][w.action1_map[s][i]] != i) {
        return {false, 3, "condition (3) fails: f2 at '" + g.state_name(fs) + "' does not undo f1 at '" +
                              g.state_name(s) + "' for action " + g.actions1(s)[i]};
      }
    }
    for (ActionIndex j = 0; j < g.num_actions2(s); ++j) {
      if (w.action1_map[fs][w.action2_map[s][j]] != j) {
        return {false, 3, "condition (3) fails: f1 at '" + g.state_name(fs) + "' does not undo f2 at '" +
                              g.state_name(s) + "' for action " + g.actions2(s)[j]};
      }
    }
  }
  return {};
}

StationaryStrategy mirror_strategy(const Game& g, const SkewSymmetryWitness& w, const StationaryStrategy& sigma) {
  validate_strategy(g, sigma);
  const std::size_t n = g.num_states();
  const bool from_p1 = sigma.player == 1;
  StationaryStrategy out;
  out.player = from_p1 ? 2 : 1;
  out.probabilities.resize(n);
  std::vector<std::vector<Rational>> exact(n);
  for (StateIndex s = 0; s < n; ++s) {
    const std::size_t k = from_p1 ? g.num_actions2(s) : g.num_actions1(s);
    out.probabilities[s].assign(k, 0.0);
    exact[s].assign(k, Rational(0));
  }
  for (StateIndex s = 0; s < n; ++s) {
    const StateIndex fs = w.state_map.at(s);
    const auto& map = from_p1 ? w.action1_map.at(s) : w.action2_map.at(s);
    for (ActionIndex a = 0; a < sigma.at(s).size(); ++a) {
      out.probabilities[fs].at(map.at(a)) = sigma.at(s)[a];
      if (sigma.exact) exact[fs][map[a]] = (*sigma.exact)[s][a];
    }
  }
  if (sigma.exact) out.exact = std::move(exact);
  return out;
}

std::string serialize_witness(const Game& g, const SkewSymmetryWitness& w) {
  Json doc;
  Json states = Json::object(), a1 = Json::object(), a2 = Json::object();
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    const StateIndex fs = w.state_map.at(s);
    states[g.state_name(s)] = g.state_name(fs);
    Json m1 = Json::object(), m2 = Json::object();
    for (ActionIndex a = 0; a < g.num_actions1(s); ++a) m1[g.actions1(s)[a]] = g.actions2(fs).at(w.action1_map.at(s).at(a));
    for (ActionIndex a = 0; a < g.num_actions2(s); ++a) m2[g.actions2(s)[a]] = g.actions1(fs).at(w.action2_map.at(s).at(a));
    a1[g.state_name(s)] = std::move(m1);
    a2[g.state_name(s)] = std::move(m2);
  }
  doc["states"] = std::move(states);
  doc["actions1"] = std::move(a1);
  doc["actions2"] = std::move(a2);
  return doc.dump(2) + "\n";
}

SkewSymmetryWitness parse_witness(const Game& g, std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("witness document: ") + e.what());
  }
  const auto field = [&](const char* key) -> const Json& {
    if (!doc.is_object() || !doc.contains(key) || !doc.at(key).is_object()) {
      throw ParseError(std::string("witness document needs an object field '") + key + "'");
    }
    return doc.at(key);
  };
  const Json& states = field("states");
  const Json& acts1 = field("actions1");
  const Json& acts2 = field("actions2");
  const std::size_t n = g.num_states();
  SkewSymmetryWitness w;
  w.state_map.resize(n);
  w.action1_map.resize(n);
  w.action2_map.resize(n);
  const auto str = [](const Json& j, const std::string& where) {
    if (!j.is_string()) throw ParseError("expected a string at " + where);
    return j.get<std::string>();
  };
  for (StateIndex s = 0; s < n; ++s) {
    const std::string& name = g.state_name(s);
    if (!states.contains(name)) throw ValidationError("witness state map is not total: missing '" + name + "'");
    const StateIndex fs = g.state_index(str(states.at(name), "states." + name));
    w.state_map[s] = fs;
    for (int player = 1; player <= 2; ++player) {
      const Json& maps = player == 1 ? acts1 : acts2;
      const auto& domain = player == 1 ? g.actions1(s) : g.actions2(s);
      const auto& codomain = player == 1 ? g.actions2(fs) : g.actions1(fs);
      auto& out = player == 1 ? w.action1_map[s] : w.action2_map[s];
      if (!maps.contains(name) || !maps.at(name).is_object()) {
        throw ValidationError("witness action map " + std::to_string(player) + " is not total at '" + name + "'");
      }
      for (const std::string& a : domain) {
        const Json& m = maps.at(name);
        if (!m.contains(a)) throw ValidationError("witness action map is not total at '" + name + "', action " + a);
        const std::string target = str(m.at(a), "actions." + name + "." + a);
        const auto it = std::find(codomain.begin(), codomain.end(), target);
        if (it == codomain.end()) throw ValidationError("witness maps " + a + " at '" + name + "' to unknown action " + target);
        out.push_back(static_cast<ActionIndex>(it - codomain.begin()));
      }
    }
  }
  return w;
}

}  // namespace cmpg
