#include "cmpg/game_io.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "cmpg/error.hpp"
#include "json.hpp"

namespace cmpg {

namespace {

using Json = nlohmann::ordered_json;

Json parse_json(std::string_view text, const char* what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const std::size_t line =
        1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
    std::ostringstream msg;
    msg << what << " syntax error at line " << line << ": " << e.what();
    throw ParseError(msg.str());
  }
}

const Json& require(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError("missing field '" + key + "' in " + where);
  }
  return obj.at(key);
}

std::string require_string(const Json& value, const std::string& where) {
  if (!value.is_string()) throw ParseError("expected a string at " + where);
  return value.get<std::string>();
}

Rational rational_field(const Json& value, const std::string& where) {
  if (value.is_number_integer()) return Rational(value.get<long>());
  if (!value.is_string()) throw ParseError("expected a rational string at " + where);
  try {
    return Rational::parse(value.get<std::string>());
  } catch (const ParseError& e) {
    throw ParseError(std::string(e.what()) + " at " + where);
  }
}

std::vector<std::string> action_list(const Json& map, const std::string& state, const std::string& field) {
  const std::string where = field + "." + state;
  const Json& list = require(map, state, field);
  if (!list.is_array()) throw ParseError("expected an action list at " + where);
  std::vector<std::string> out;
  for (std::size_t k = 0; k < list.size(); ++k) {
    out.push_back(require_string(list[k], where + "[" + std::to_string(k) + "]"));
  }
  return out;
}

}  // namespace

Game parse_game(std::string_view text) {
  const Json doc = parse_json(text, "game document");
  if (!doc.is_object()) throw ParseError("game document must be a JSON object");

  const Json& states_json = require(doc, "states", "game document");
  if (!states_json.is_array()) throw ParseError("field 'states' must be a list");
  std::vector<std::string> states;
  for (std::size_t k = 0; k < states_json.size(); ++k) {
    states.push_back(require_string(states_json[k], "states[" + std::to_string(k) + "]"));
  }

  const Json& gamma1 = require(doc, "gamma1", "game document");
  const Json& gamma2 = require(doc, "gamma2", "game document");
  for (const auto* map : {&gamma1, &gamma2}) {
    if (!map->is_object()) throw ParseError("fields 'gamma1'/'gamma2' must be objects");
    for (const auto& [key, _] : map->items()) {
      if (std::find(states.begin(), states.end(), key) == states.end()) {
        throw ValidationError("action set declared for undeclared state '" + key + "'");
      }
    }
  }

  GameBuilder builder;
  for (const std::string& s : states) {
    builder.add_state(s, action_list(gamma1, s, "gamma1"), action_list(gamma2, s, "gamma2"));
  }

  const Json& transitions = require(doc, "transitions", "game document");
  if (!transitions.is_array()) throw ParseError("field 'transitions' must be a list");
  for (std::size_t k = 0; k < transitions.size(); ++k) {
    const std::string where = "transitions[" + std::to_string(k) + "]";
    const Json& rec = transitions[k];
    const std::string from = require_string(require(rec, "from", where), where + ".from");
    const std::string a1 = require_string(require(rec, "a1", where), where + ".a1");
    const std::string a2 = require_string(require(rec, "a2", where), where + ".a2");
    const Rational reward = rational_field(require(rec, "reward", where), where + ".reward");
    const Json& succ = require(rec, "successors", where);
    if (!succ.is_object()) throw ParseError("expected an object at " + where + ".successors");
    std::vector<std::pair<std::string, Rational>> successors;
    for (const auto& [target, p] : succ.items()) {
      successors.emplace_back(target, rational_field(p, where + ".successors." + target));
    }
    builder.set(from, a1, a2, reward, successors);
  }
  builder.reward_scale(rational_field(require(doc, "reward_scale", "game document"), "reward_scale"));
  return builder.build();
}

std::string serialize_game(const Game& g) {
  Json doc;
  doc["states"] = g.states();
  Json gamma1 = Json::object(), gamma2 = Json::object();
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    gamma1[g.state_name(s)] = g.actions1(s);
    gamma2[g.state_name(s)] = g.actions2(s);
  }
  doc["gamma1"] = std::move(gamma1);
  doc["gamma2"] = std::move(gamma2);
  Json transitions = Json::array();
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    for (ActionIndex a1 = 0; a1 < g.num_actions1(s); ++a1) {
      for (ActionIndex a2 = 0; a2 < g.num_actions2(s); ++a2) {
        const Transition& t = g.transition(s, a1, a2);
        Json rec;
        rec["from"] = g.state_name(s);
        rec["a1"] = g.actions1(s)[a1];
        rec["a2"] = g.actions2(s)[a2];
        rec["reward"] = t.reward.str();
        Json succ = Json::object();
        for (const Successor& x : t.successors) succ[g.state_name(x.state)] = x.probability.str();
        rec["successors"] = std::move(succ);
        transitions.push_back(std::move(rec));
      }
    }
  }
  doc["transitions"] = std::move(transitions);
  doc["reward_scale"] = g.reward_scale().str();
  return doc.dump(2) + "\n";
}

StationaryStrategy parse_strategy(const Game& g, std::string_view text) {
  const Json doc = parse_json(text, "strategy document");
  const Json& player_json = require(doc, "player", "strategy document");
  if (!player_json.is_number_integer()) throw ParseError("field 'player' must be 1 or 2");
  const int player = player_json.get<int>();
  if (player != 1 && player != 2) throw ValidationError("field 'player' must be 1 or 2");
  const Json& map = require(doc, "strategy", "strategy document");
  if (!map.is_object()) throw ParseError("field 'strategy' must be an object");
  for (const auto& [key, _] : map.items()) {
    if (!g.find_state(key)) throw ValidationError("strategy names undeclared state '" + key + "'");
  }

  bool all_exact = true;
  std::vector<std::vector<Rational>> exact(g.num_states());
  std::vector<std::vector<double>> floats(g.num_states());
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    const auto& acts = player == 1 ? g.actions1(s) : g.actions2(s);
    exact[s].assign(acts.size(), Rational(0));
    floats[s].assign(acts.size(), 0.0);
    const std::string where = "strategy." + g.state_name(s);
    const Json& dist = require(map, g.state_name(s), "strategy");
    if (!dist.is_object()) throw ParseError("expected an object at " + where);
    for (const auto& [action, p] : dist.items()) {
      const auto it = std::find(acts.begin(), acts.end(), action);
      if (it == acts.end()) {
        throw ValidationError("action '" + action + "' is not available to player " + std::to_string(player) +
                              " at '" + g.state_name(s) + "'");
      }
      const auto a = static_cast<std::size_t>(it - acts.begin());
      if (p.is_number_float()) {
        all_exact = false;
        floats[s][a] = p.get<double>();
      } else {
        exact[s][a] = rational_field(p, where + "." + action);
        floats[s][a] = exact[s][a].to_double();
      }
    }
  }
  StationaryStrategy sigma;
  if (all_exact) {
    sigma = StationaryStrategy::from_exact(player, std::move(exact));
  } else {
    sigma.player = player;
    sigma.probabilities = std::move(floats);
  }
  validate_strategy(g, sigma);
  return sigma;
}

std::string serialize_strategy(const Game& g, const StationaryStrategy& sigma) {
  Json doc;
  doc["player"] = sigma.player;
  Json map = Json::object();
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    const auto& acts = sigma.player == 1 ? g.actions1(s) : g.actions2(s);
    Json dist = Json::object();
    for (std::size_t a = 0; a < acts.size(); ++a) {
      if (sigma.exact) {
        dist[acts[a]] = (*sigma.exact)[s][a].str();
      } else {
        dist[acts[a]] = sigma.probabilities[s][a];
      }
    }
    map[g.state_name(s)] = std::move(dist);
  }
  doc["strategy"] = std::move(map);
  return doc.dump(2) + "\n";
}

std::string read_text(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "': file not found or unreadable");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_text(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
}

}  // namespace cmpg
