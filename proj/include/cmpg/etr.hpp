#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmpg/classify.hpp"
#include "cmpg/game.hpp"
#include "cmpg/rational.hpp"

namespace cmpg {

// Sparse polynomial with rational coefficients. A monomial is the sorted list
// of its variable indices (repeated for powers); the empty monomial is the
// constant term. Zero coefficients are never stored.
class Polynomial {
 public:
  using Monomial = std::vector<std::size_t>;

  Polynomial() = default;
  static Polynomial constant(const Rational& c);
  static Polynomial variable(std::size_t index);

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  void add_term(Monomial m, const Rational& c);

  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Rational& c, const Polynomial& p);
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

  double evaluate(const std::vector<double>& values) const;

 private:
  std::map<Monomial, Rational> terms_;
};

enum class Relation { Le, Ge, Eq };

struct Constraint {
  Polynomial lhs;
  Relation relation = Relation::Le;
  Polynomial rhs;
  std::string label;

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

struct EtrComponent {
  std::vector<std::string> states;
  std::string anchor;
  std::string gain_variable;

  friend bool operator==(const EtrComponent&, const EtrComponent&) = default;
};

// Conjunction of polynomial constraints over real variables. Rewards are
// normalised by the game's reward scale, so the gain variables and lambda are
// in normalised units.
struct EtrSentence {
  std::vector<std::string> variables;
  std::vector<Constraint> constraints;
  std::vector<EtrComponent> components;
  std::optional<Rational> lambda;  // normalised
  std::optional<std::string> query_state;

  std::optional<std::size_t> find_variable(const std::string& name) const;
  friend bool operator==(const EtrSentence&, const EtrSentence&) = default;
};

// Variable names used by the emitters.
std::string gain_variable(std::size_t component);
std::string x_variable(const std::string& state, const std::string& action);
std::string y_variable(const std::string& state, const std::string& action);
std::string v_variable(const std::string& state);
std::string z_variable(const std::string& state);

// The fixpoint sentence of one ergodic component (given as sorted state
// indices) with v_{s*} = 0. Throws PreconditionError unless `component` is
// one of the game's verified ergodic components.
EtrSentence emit_etr_component(const Game& g, const StateSet& component, StateIndex s_star,
                               std::size_t index = 0);

// "value at s0 is at most lambda" for an almost-sure ergodic game; lambda in
// unnormalised reward units. Throws PreconditionError on verdict None.
EtrSentence emit_etr_full(const Game& g, const Rational& lambda, StateIndex s0);

// SMT-LIB 2 (QF_NRA): one named assert per constraint, rationals as (/ p q),
// metadata in "; @" comment lines. parse_smtlib reads this exact dialect.
std::string to_smtlib(const EtrSentence& sentence);
EtrSentence parse_smtlib(std::string_view text);

struct AssignmentCheck {
  bool ok = true;
  std::string violated;  // label of the first violated constraint
  double excess = 0.0;   // amount by which it is violated
};

using Assignment = std::map<std::string, double>;

// Equalities pass when |lhs - rhs| <= tol, inequalities when violated by at
// most tol. Throws PreconditionError for a missing variable.
AssignmentCheck check_assignment(const EtrSentence& sentence, const Assignment& assignment, double tol);

// JSON object variable -> number, decimal string or "p/q".
Assignment parse_assignment(std::string_view text);
std::string serialize_assignment(const Assignment& assignment);

}  // namespace cmpg
