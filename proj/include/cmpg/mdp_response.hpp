#pragma once

#include <cstddef>
#include <vector>

#include "cmpg/game.hpp"

namespace cmpg {

// Markov chain induced by a stationary profile; rewards unnormalised.
struct InducedChain {
  std::vector<double> reward;
  std::vector<std::vector<std::pair<StateIndex, double>>> next;  // merged, sorted by state
};

InducedChain induced_chain(const Game& g, const StationaryStrategy& sigma1, const StationaryStrategy& sigma2);

struct GainBias {
  double gain = 0.0;
  std::vector<double> potentials;  // potentials[t] == 0
};

// Solves g + v_s = r_s + sum_s' P(s, s') v_s', v_t = 0 on the chain restricted
// to `states` (all states when empty; the subset must be closed). Potentials
// of states outside the subset are left at 0. Throws SolverError when the
// system is singular, i.e. the chain is not unichain.
GainBias chain_gain_bias(const InducedChain& chain, StateIndex t, const std::vector<StateIndex>& states = {});

// Gain and potentials of the profile (sigma1, sigma2).
GainBias solve_gain_bias(const Game& g, const StationaryStrategy& sigma1, const StationaryStrategy& sigma2,
                         StateIndex t);

// Player 2's response to a fixed Player-1 strategy.
struct PotentialSolution {
  double gain = 0.0;
  std::vector<double> potentials;
  StateIndex anchor = 0;
  std::vector<ActionIndex> policy;  // positional Player-2 choice per state
  std::size_t iterations = 0;       // policy evaluations performed
  std::vector<double> gain_history;
};

// E[R(s, sigma1(s), a2)] + sum_s' delta(s, sigma1(s), a2)(s') v_s' for every a2.
std::vector<double> lookahead(const Game& g, const StationaryStrategy& sigma1, StateIndex s,
                              const std::vector<double>& potentials);

// Howard policy iteration for the minimiser. Starts from the policy that
// minimises the immediate expected reward, keeps the incumbent action on ties
// and stops when no state improves. max_iterations = 0 means 10 * n * m.
PotentialSolution best_response_potentials(const Game& g, const StationaryStrategy& sigma1, StateIndex t,
                                           std::size_t max_iterations = 0);

// max_s |g + v_s - min_a2 lookahead(s)[a2]|
double min_equation_residual(const Game& g, const StationaryStrategy& sigma1, const PotentialSolution& sol);

}  // namespace cmpg
