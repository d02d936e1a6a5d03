#include "cmpg/etr.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "cmpg/error.hpp"
#include "json.hpp"

namespace cmpg {

// --- polynomials ------------------------------------------------------------

Polynomial Polynomial::constant(const Rational& c) {
  Polynomial p;
  p.add_term({}, c);
  return p;
}

Polynomial Polynomial::variable(std::size_t index) {
  Polynomial p;
  p.add_term({index}, Rational(1));
  return p;
}

void Polynomial::add_term(Monomial m, const Rational& c) {
  if (c.is_zero()) return;
  std::sort(m.begin(), m.end());
  auto [it, inserted] = terms_.emplace(std::move(m), c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  for (const auto& [m, c] : rhs.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
  for (const auto& [m, c] : rhs.terms_) add_term(m, -c);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Polynomial::Monomial m = ma;
      m.insert(m.end(), mb.begin(), mb.end());
      out.add_term(std::move(m), ca * cb);
    }
  }
  return out;
}

Polynomial operator*(const Rational& c, const Polynomial& p) { return Polynomial::constant(c) * p; }

double Polynomial::evaluate(const std::vector<double>& values) const {
  double total = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = c.to_double();
    for (std::size_t v : m) t *= values.at(v);
    total += t;
  }
  return total;
}

std::optional<std::size_t> EtrSentence::find_variable(const std::string& name) const {
  const auto it = std::find(variables.begin(), variables.end(), name);
  if (it == variables.end()) return std::nullopt;
  return static_cast<std::size_t>(it - variables.begin());
}

// --- emission ---------------------------------------------------------------

std::string gain_variable(std::size_t component) { return "g[" + std::to_string(component) + "]"; }
std::string x_variable(const std::string& state, const std::string& action) { return "x[" + state + "," + action + "]"; }
std::string y_variable(const std::string& state, const std::string& action) { return "y[" + state + "," + action + "]"; }
std::string v_variable(const std::string& state) { return "v[" + state + "]"; }
std::string z_variable(const std::string& state) { return "z[" + state + "]"; }

namespace {

class SentenceBuilder {
 public:
  explicit SentenceBuilder(const Game& g) : g_(g) {}

  Polynomial var(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) {
      it = index_.emplace(name, out_.variables.size()).first;
      out_.variables.push_back(name);
    }
    return Polynomial::variable(it->second);
  }

  void add(Polynomial lhs, Relation rel, Polynomial rhs, std::string label) {
    out_.constraints.push_back({std::move(lhs), rel, std::move(rhs), std::move(label)});
  }

  void prob_dist(StateIndex s, int player) {
    const std::string& name = g_.state_name(s);
    const auto& acts = player == 1 ? g_.actions1(s) : g_.actions2(s);
    const char* tag = player == 1 ? "x" : "y";
    Polynomial sum;
    for (const std::string& a : acts) {
      const Polynomial p = player == 1 ? var(x_variable(name, a)) : var(y_variable(name, a));
      add(p, Relation::Ge, Polynomial(), std::string(tag) + "pos[" + name + "," + a + "]");
      sum += p;
    }
    add(sum, Relation::Eq, Polynomial::constant(Rational(1)), std::string(tag) + "sum[" + name + "]");
  }

  // sum_t delta(s,i,j)(t) * <value variable of t>
  Polynomial expected_next(StateIndex s, ActionIndex i, ActionIndex j, std::string (*name)(const std::string&)) {
    Polynomial out;
    for (const Successor& x : g_.transition(s, i, j).successors) out += x.probability * var(name(g_.state_name(x.state)));
    return out;
  }

  void component(const StateSet& states, StateIndex s_star, std::size_t index) {
    const Polynomial gain = var(gain_variable(index));
    const Rational& scale = g_.reward_scale();
    // Declare in a fixed order: x and y blocks state by state, then potentials.
    for (StateIndex s : states) {
      for (const std::string& a : g_.actions1(s)) var(x_variable(g_.state_name(s), a));
      for (const std::string& a : g_.actions2(s)) var(y_variable(g_.state_name(s), a));
    }
    for (StateIndex s : states) var(v_variable(g_.state_name(s)));

    for (StateIndex s : states) {
      const std::string& name = g_.state_name(s);
      const Polynomial left = gain + var(v_variable(name));
      for (ActionIndex j = 0; j < g_.num_actions2(s); ++j) {
        Polynomial right;
        for (ActionIndex i = 0; i < g_.num_actions1(s); ++i) {
          const Polynomial cont =
              Polynomial::constant(g_.transition(s, i, j).reward / scale) + expected_next(s, i, j, v_variable);
          right += var(x_variable(name, g_.actions1(s)[i])) * cont;
        }
        add(left, Relation::Le, right, "le[" + name + "," + g_.actions2(s)[j] + "]");
      }
    }
    for (StateIndex s : states) {
      const std::string& name = g_.state_name(s);
      const Polynomial left = gain + var(v_variable(name));
      for (ActionIndex i = 0; i < g_.num_actions1(s); ++i) {
        Polynomial right;
        for (ActionIndex j = 0; j < g_.num_actions2(s); ++j) {
          const Polynomial cont =
              Polynomial::constant(g_.transition(s, i, j).reward / scale) + expected_next(s, i, j, v_variable);
          right += var(y_variable(name, g_.actions2(s)[j])) * cont;
        }
        add(left, Relation::Ge, right, "ge[" + name + "," + g_.actions1(s)[i] + "]");
      }
    }
    for (StateIndex s : states) {
      prob_dist(s, 1);
      prob_dist(s, 2);
    }
    add(var(v_variable(g_.state_name(s_star))), Relation::Eq, Polynomial(), "anchor[" + std::to_string(index) + "]");

    EtrComponent info;
    for (StateIndex s : states) info.states.push_back(g_.state_name(s));
    info.anchor = g_.state_name(s_star);
    info.gain_variable = gain_variable(index);
    out_.components.push_back(std::move(info));
  }

  void reach_block(const std::vector<StateIndex>& outside) {
    for (StateIndex s : outside) {
      for (const std::string& a : g_.actions1(s)) var(x_variable(g_.state_name(s), a));
      for (const std::string& a : g_.actions2(s)) var(y_variable(g_.state_name(s), a));
    }
    for (StateIndex s = 0; s < g_.num_states(); ++s) var(z_variable(g_.state_name(s)));
    for (StateIndex s : outside) {
      const std::string& name = g_.state_name(s);
      for (ActionIndex j = 0; j < g_.num_actions2(s); ++j) {
        Polynomial right;
        for (ActionIndex i = 0; i < g_.num_actions1(s); ++i) {
          right += var(x_variable(name, g_.actions1(s)[i])) * expected_next(s, i, j, z_variable);
        }
        add(var(z_variable(name)), Relation::Le, right, "zle[" + name + "," + g_.actions2(s)[j] + "]");
      }
    }
    for (StateIndex s : outside) {
      const std::string& name = g_.state_name(s);
      for (ActionIndex i = 0; i < g_.num_actions1(s); ++i) {
        Polynomial right;
        for (ActionIndex j = 0; j < g_.num_actions2(s); ++j) {
          right += var(y_variable(name, g_.actions2(s)[j])) * expected_next(s, i, j, z_variable);
        }
        add(var(z_variable(name)), Relation::Ge, right, "zge[" + name + "," + g_.actions1(s)[i] + "]");
      }
    }
  }

  void bind(StateIndex s, std::size_t component) {
    add(var(z_variable(g_.state_name(s))), Relation::Eq, var(gain_variable(component)),
        "bind[" + g_.state_name(s) + "]");
  }

  void prob_dists(const std::vector<StateIndex>& states) {
    for (StateIndex s : states) {
      prob_dist(s, 1);
      prob_dist(s, 2);
    }
  }

  EtrSentence finish() { return std::move(out_); }

 private:
  const Game& g_;
  EtrSentence out_;
  std::unordered_map<std::string, std::size_t> index_;
};

void check_identifiers(const Game& g) {
  const auto bad = [](const std::string& s) { return s.find_first_of("|\\") != std::string::npos; };
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    if (bad(g.state_name(s))) throw PreconditionError("state '" + g.state_name(s) + "' cannot be exported: contains | or \\");
    for (const auto* acts : {&g.actions1(s), &g.actions2(s)}) {
      for (const std::string& a : *acts) {
        if (bad(a)) throw PreconditionError("action '" + a + "' cannot be exported: contains | or \\");
      }
    }
  }
}

}  // namespace

EtrSentence emit_etr_component(const Game& g, const StateSet& component, StateIndex s_star, std::size_t index) {
  check_identifiers(g);
  const std::vector<StateSet> comps = ergodic_components(g);
  if (std::find(comps.begin(), comps.end(), component) == comps.end()) {
    throw PreconditionError("the given state set is not an ergodic component of the game");
  }
  if (!std::binary_search(component.begin(), component.end(), s_star)) {
    throw PreconditionError("anchor state '" + g.state_name(s_star) + "' is outside the component");
  }
  SentenceBuilder b(g);
  b.component(component, s_star, index);
  return b.finish();
}

EtrSentence emit_etr_full(const Game& g, const Rational& lambda, StateIndex s0) {
  check_identifiers(g);
  if (s0 >= g.num_states()) throw PreconditionError("query state out of range");
  const Classification cls = classify(g);
  if (cls.verdict == Verdict::None) {
    throw PreconditionError("game is not almost-sure ergodic; no sentence is emitted");
  }
  const Rational normalized = lambda / g.reward_scale();
  SentenceBuilder b(g);
  for (std::size_t k = 0; k < cls.components.size(); ++k) {
    b.component(cls.components[k], cls.components[k].front(), k);
  }
  std::vector<std::size_t> owner(g.num_states(), cls.components.size());
  for (std::size_t k = 0; k < cls.components.size(); ++k) {
    for (StateIndex s : cls.components[k]) owner[s] = k;
  }
  if (cls.verdict == Verdict::Ergodic) {
    b.add(b.var(gain_variable(0)), Relation::Le, Polynomial::constant(normalized), "lambda");
  } else {
    std::vector<StateIndex> outside;
    for (StateIndex s = 0; s < g.num_states(); ++s) {
      if (owner[s] == cls.components.size()) outside.push_back(s);
    }
    b.reach_block(outside);
    for (StateIndex s = 0; s < g.num_states(); ++s) {
      if (owner[s] < cls.components.size()) b.bind(s, owner[s]);
    }
    b.prob_dists(outside);
    b.add(b.var(z_variable(g.state_name(s0))), Relation::Le, Polynomial::constant(normalized), "lambda");
  }
  EtrSentence out = b.finish();
  out.lambda = normalized;
  out.query_state = g.state_name(s0);
  return out;
}

// --- substitution -----------------------------------------------------------

AssignmentCheck check_assignment(const EtrSentence& sentence, const Assignment& assignment, double tol) {
  std::vector<double> values(sentence.variables.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const auto it = assignment.find(sentence.variables[k]);
    if (it == assignment.end()) {
      throw PreconditionError("assignment has no value for variable '" + sentence.variables[k] + "'");
    }
    values[k] = it->second;
  }
  for (const Constraint& c : sentence.constraints) {
    const double d = c.lhs.evaluate(values) - c.rhs.evaluate(values);
    double excess = 0.0;
    switch (c.relation) {
      case Relation::Le:
        excess = d;
        break;
      case Relation::Ge:
        excess = -d;
        break;
      case Relation::Eq:
        excess = std::abs(d);
        break;
    }
    if (!(excess <= tol)) return {false, c.label, excess};
  }
  return {};
}

Assignment parse_assignment(std::string_view text) {
  using Json = nlohmann::json;
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("assignment document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("assignment document must be an object of variable -> value");
  Assignment out;
  for (const auto& [name, value] : doc.items()) {
    if (value.is_number()) {
      out[name] = value.get<double>();
    } else if (value.is_string()) {
      out[name] = Rational::parse(value.get<std::string>()).to_double();
    } else {
      throw ParseError("assignment value for '" + name + "' must be a number or a rational string");
    }
  }
  return out;
}

std::string serialize_assignment(const Assignment& assignment) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& [name, value] : assignment) doc[name] = value;
  return doc.dump(2) + "\n";
}

}  // namespace cmpg
