#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "cmpg/game.hpp"
#include "cmpg/matrix_game.hpp"
#include "cmpg/mdp_response.hpp"
#include "cmpg/rational.hpp"

namespace cmpg {

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  double midpoint() const { return 0.5 * (lo + hi); }
  bool contains(double x, double slack = 0.0) const { return lo - slack <= x && x <= hi + slack; }
};

struct ValueIterationOptions {
  std::int64_t steps = 1;
  // Stop early once the tight bracket is at most this wide (0 disables).
  double stop_width = 0.0;
  bool trace = false;
  unsigned threads = 1;
};

struct ValueIterationTrace {
  std::int64_t step = 0;
  Bracket bracket;
  Bracket tight;
};

// Finite-horizon averages v^T (unnormalised). `bracket` is [min_s v^T_s,
// max_s v^T_s]. `increment` is [min_s, max_s] of T v^T - (T-1) v^{T-1}, which
// contains every state's value for any game; `tight` is the intersection of
// the two and is meaningful on ergodic games.
struct ValueIterationResult {
  std::vector<double> values;
  Bracket bracket;
  Bracket increment;
  Bracket tight;
  std::int64_t steps = 0;
  std::vector<ValueIterationTrace> trace;
};

ValueIterationResult value_iteration(const Game& g, const ValueIterationOptions& options);
inline ValueIterationResult value_iteration(const Game& g, std::int64_t steps) {
  ValueIterationOptions o;
  o.steps = steps;
  return value_iteration(g, o);
}

// ceil(4 H c log2 c) with c = 2W/epsilon and H = n delta_min^-r; at least 1.
// Saturates at INT64_MAX.
std::int64_t vi_steps_for_epsilon(const GameStats& stats, const Rational& reward_scale, const Rational& epsilon);

// n * delta_min^-r
Rational hitting_bound(const GameStats& stats);

// Long-run average reward of the profile from s, computed on the states
// reachable from s. Throws SolverError when that chain is not unichain.
double evaluate_profile(const Game& g, const StationaryStrategy& sigma1, const StationaryStrategy& sigma2,
                        StateIndex s);

// Expected steps until t is first visited from s; +infinity when t is missed
// with positive probability.
double hitting_time(const Game& g, const StationaryStrategy& sigma1, const StationaryStrategy& sigma2,
                    StateIndex s, StateIndex t);

struct StrategyIterationOptions {
  std::optional<std::int64_t> q;  // overrides the q derived from epsilon
  std::size_t max_iterations = 1'000'000;
  std::uint64_t node_budget = kDefaultNodeBudget;
  std::size_t response_iterations = 0;  // Player-2 policy-iteration cap, 0 = default
  double lp_tol = 1e-9;                 // relative tolerance of the keep-or-replace test
  bool trace = false;
  unsigned threads = 1;
};

struct StrategyIterationTrace {
  std::size_t iteration = 0;
  double gain = 0.0;
  StationaryStrategy strategy;  // the strategy evaluated in this iteration
  std::vector<StateIndex> changed;
};

struct StrategyIterationResult {
  StationaryStrategy strategy;
  double gain = 0.0;
  PotentialSolution potentials;  // best response to `strategy`
  std::size_t iterations = 0;
  std::int64_t q = 1;
  double epsilon_guarantee = 0.0;  // W * 4 m n^2 delta_min^-r / q, unnormalised
  std::vector<double> gains;       // g^0, g^1, ...
  std::vector<StrategyIterationTrace> trace;
};

// q-rounded Hoffman-Karp strategy iteration for ergodic games. Each round
// computes Player 2's best response, forms M_s = R + sum delta v and moves
// every state whose current distribution is not a best q-rounded one to
// best_q_rounded(M_s, q). Stops at a fixed point.
StrategyIterationResult var_hoffman_karp(const Game& g, const Rational& epsilon, StateIndex t,
                                         const StrategyIterationOptions& options = {});

// The same loop with unrestricted (LP-optimal) distributions, stopping once no
// state improves by more than `tol`. Used to build near-exact optimal
// strategies and potentials.
struct HoffmanKarpResult {
  StationaryStrategy strategy;
  PotentialSolution potentials;
  std::vector<std::vector<double>> column_strategies;  // optimal y of M_s at the final potentials
  std::size_t iterations = 0;
};

HoffmanKarpResult hoffman_karp(const Game& g, StateIndex t, double tol = 1e-12, std::size_t max_iterations = 10'000);

// M_s[a1][a2] = R(s,a1,a2) + sum_s' delta(s,a1,a2)(s') v_s'
MatrixGame lookahead_matrix(const Game& g, StateIndex s, const std::vector<double>& potentials);

}  // namespace cmpg
