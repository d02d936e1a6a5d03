#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cmpg/game.hpp"
#include "cmpg/rational.hpp"

namespace cmpg {

// --- square-root games ------------------------------------------------------

// Closed-form parameters of G_b: k = smallest integer with k^2 > b and
// d = 2k - 2b/k, except b = 2 (k = 3/2, d = 1/3).
struct SqrtParameters {
  Rational k;
  Rational d;
};
SqrtParameters sqrt_parameters(std::int64_t b);

// Two-state ergodic game of value sqrt(b) (states "u", "w"); single-state
// self-loop with reward sqrt(b) when b is 1 or 4.
Game gen_sqrt_game(std::int64_t b);

enum class SqrtEntry { U, W };

// Fresh start state "s*" moving uniformly into one copy of G_{n_i} per entry;
// copy i prefixes its states with "g<i>.". Value at s* is the mean of the roots.
Game gen_sqrt_sum(const std::vector<std::int64_t>& nums, SqrtEntry entry = SqrtEntry::U);

// --- skew symmetry ----------------------------------------------------------

// f on states plus, per state s, f1^s: Gamma1(s) -> Gamma2(f(s)) and
// f2^s: Gamma2(s) -> Gamma1(f(s)).
struct SkewSymmetryWitness {
  std::vector<StateIndex> state_map;
  std::vector<std::vector<ActionIndex>> action1_map;
  std::vector<std::vector<ActionIndex>> action2_map;
};

struct SkewCheck {
  bool ok = true;
  int condition = 0;  // 1, 2 or 3 for the first violated condition
  std::string violation;
};

// Involution and bijectivity problems throw ValidationError; otherwise the
// three conditions are checked exactly on normalised rewards, in order.
SkewCheck check_skew_symmetric(const Game& g, const SkewSymmetryWitness& w);

// The strategy of the opposite player obtained by transporting sigma along
// the witness maps.
StationaryStrategy mirror_strategy(const Game& g, const SkewSymmetryWitness& w, const StationaryStrategy& sigma);

std::string serialize_witness(const Game& g, const SkewSymmetryWitness& w);
SkewSymmetryWitness parse_witness(const Game& g, std::string_view text);

// --- the lower-bound family -------------------------------------------------

struct LowerBoundGame {
  Game game;
  SkewSymmetryWitness witness;
};

// 2k+5 states a, b, bbar, c, cbar, s1, s1bar, ..., sk, skbar; requires k >= 2
// and 0 < eta < 1/(4k+4).
LowerBoundGame gen_lower_bound(int k, const Rational& eta);

// The low-patience strategy: i2 with probability p = 2 eta^(k/2) at c and
// with probability 1 - p at cbar. Exact when k is even.
StationaryStrategy lower_bound_sigma_star(const Game& g, int k, const Rational& eta);

// --- simple stochastic games ------------------------------------------------

struct SsgShape {
  StateIndex top;
  StateIndex bottom;
  std::vector<StateIndex> nonterminal;
};

// Throws ValidationError naming the first violated SSG condition.
SsgShape validate_ssg(const Game& g);

// Red(G, s): terminals leak to a fresh state "s'" with probability 2^-alpha,
// which returns to s with probability 1 - 2^-beta and otherwise spreads
// evenly over the remaining n + 1 states.
Game reduce_ssg(const Game& g, StateIndex s, int alpha, int beta);

// Interval guaranteed to contain the value of reduce_ssg(g, s, alpha, beta)
// for an SSG with n non-terminal states and v_s = value. With alpha = 9n,
// beta = 7n this is [v - 2^(-7n+1), v + 2^(-7n+1)]; otherwise
// [v kappa, 1 - (1 - v) kappa] with kappa = 2^alpha (1 - 2^-beta) / (n 2^n + 2^alpha + 1).
std::pair<Rational, Rational> reduction_interval(std::size_t n, const Rational& value, int alpha, int beta);

// --- rational reconstruction ------------------------------------------------

struct KwekMehlhornResult {
  Rational value;
  std::size_t oracle_calls = 0;
};

// Largest-denominator-bounded lower approximation of the hidden a in [0, 1]
// with q <= b and 0 <= a - p/q < 1/b, by Stern-Brocot descent with galloping
// run lengths. `oracle(p, q)` answers a >= p/q. Inconsistent answers throw.
KwekMehlhornResult kwek_mehlhorn(const std::function<bool(std::int64_t, std::int64_t)>& oracle, std::int64_t b);

}  // namespace cmpg
