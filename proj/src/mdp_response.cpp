#include "cmpg/mdp_response.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cmpg/error.hpp"
#include "linalg.hpp"

namespace cmpg {

InducedChain induced_chain(const Game& g, const StationaryStrategy& sigma1, const StationaryStrategy& sigma2) {
  const std::size_t n = g.num_states();
  if (sigma1.probabilities.size() != n || sigma2.probabilities.size() != n) {
    throw PreconditionError("strategy does not match the game's state count");
  }
  InducedChain chain;
  chain.reward.assign(n, 0.0);
  chain.next.resize(n);
  for (StateIndex s = 0; s < n; ++s) {
    const auto& d1 = sigma1.at(s);
    const auto& d2 = sigma2.at(s);
    if (d1.size() != g.num_actions1(s) || d2.size() != g.num_actions2(s)) {
      throw PreconditionError("strategy does not match the actions of state '" + g.state_name(s) + "'");
    }
    std::map<StateIndex, double> acc;
    for (ActionIndex a1 = 0; a1 < d1.size(); ++a1) {
      if (d1[a1] == 0.0) continue;
      for (ActionIndex a2 = 0; a2 < d2.size(); ++a2) {
        const double w = d1[a1] * d2[a2];
        if (w == 0.0) continue;
        const FloatTransition& t = g.float_transition(s, a1, a2);
        chain.reward[s] += w * t.reward;
        for (const auto& [to, p] : t.successors) acc[to] += w * p;
      }
    }
    chain.next[s].assign(acc.begin(), acc.end());
  }
  return chain;
}

GainBias chain_gain_bias(const InducedChain& chain, StateIndex t, const std::vector<StateIndex>& states) {
  const std::size_t total = chain.reward.size();
  std::vector<StateIndex> sub = states;
  if (sub.empty()) {
    for (StateIndex s = 0; s < total; ++s) sub.push_back(s);
  }
  std::vector<std::size_t> pos(total, total);
  for (std::size_t k = 0; k < sub.size(); ++k) pos[sub[k]] = k;
  if (t >= total || pos[t] == total) throw PreconditionError("anchor state outside the evaluated chain");

  // Unknowns: v over `sub`, then g. Row k: g + v_k - sum P v = r_k, except
  // that the row of the anchor's column is pinned by v_t = 0 appended last.
  const std::size_t k_n = sub.size();
  const std::size_t dim = k_n + 1;
  std::vector<double> a(dim * dim, 0.0);
  std::vector<double> b(dim, 0.0);
  for (std::size_t k = 0; k < k_n; ++k) {
    const StateIndex s = sub[k];
    a[k * dim + k] += 1.0;
    a[k * dim + k_n] = 1.0;
    for (const auto& [to, p] : chain.next[s]) {
      if (pos[to] == total) throw PreconditionError("evaluated state set is not closed under the chain");
      a[k * dim + pos[to]] -= p;
    }
    b[k] = chain.reward[s];
  }
  a[k_n * dim + pos[t]] = 1.0;

  std::vector<double> x;
  try {
    x = detail::lu_solve(a, b, dim);
  } catch (const SolverError&) {
    throw SolverError("gain/bias system is singular: the induced chain is not unichain");
  }
  // One step of iterative refinement.
  std::vector<double> residual(b);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) residual[i] -= a[i * dim + j] * x[j];
  }
  const std::vector<double> dx = detail::lu_solve(a, residual, dim);
  for (std::size_t i = 0; i < dim; ++i) x[i] += dx[i];

  GainBias out;
  out.gain = x[k_n];
  out.potentials.assign(total, 0.0);
  for (std::size_t k = 0; k < k_n; ++k) out.potentials[sub[k]] = x[k];
  out.potentials[t] = 0.0;
  return out;
}

GainBias solve_gain_bias(const Game& g, const StationaryStrategy& sigma1, const StationaryStrategy& sigma2,
                         StateIndex t) {
  if (t >= g.num_states()) throw PreconditionError("anchor state out of range");
  return chain_gain_bias(induced_chain(g, sigma1, sigma2), t);
}

std::vector<double> lookahead(const Game& g, const StationaryStrategy& sigma1, StateIndex s,
                              const std::vector<double>& potentials) {
  const auto& d1 = sigma1.at(s);
  std::vector<double> out(g.num_actions2(s), 0.0);
  for (ActionIndex a2 = 0; a2 < out.size(); ++a2) {
    double v = 0.0;
    for (ActionIndex a1 = 0; a1 < d1.size(); ++a1) {
      if (d1[a1] == 0.0) continue;
      const FloatTransition& t = g.float_transition(s, a1, a2);
      double next = t.reward;
      for (const auto& [to, p] : t.successors) next += p * potentials[to];
      v += d1[a1] * next;
    }
    out[a2] = v;
  }
  return out;
}

PotentialSolution best_response_potentials(const Game& g, const StationaryStrategy& sigma1, StateIndex t,
                                           std::size_t max_iterations) {
  const std::size_t n = g.num_states();
  if (t >= n) throw PreconditionError("anchor state out of range");
  if (sigma1.player != 1) throw PreconditionError("best_response_potentials expects a Player-1 strategy");
  validate_strategy(g, sigma1);
  std::size_t m = 1;
  for (StateIndex s = 0; s < n; ++s) m = std::max({m, g.num_actions1(s), g.num_actions2(s)});
  if (max_iterations == 0) max_iterations = 10 * n * m;

  PotentialSolution sol;
  sol.anchor = t;
  sol.policy.assign(n, 0);
  const std::vector<double> zero(n, 0.0);
  for (StateIndex s = 0; s < n; ++s) {
    const std::vector<double> q = lookahead(g, sigma1, s, zero);
    sol.policy[s] = static_cast<ActionIndex>(std::min_element(q.begin(), q.end()) - q.begin());
  }

  const double tol = 1e-11 * (1.0 + g.reward_scale_double());
  for (;;) {
    if (sol.iterations >= max_iterations) {
      throw SolverError("Player-2 policy iteration did not converge within " + std::to_string(max_iterations) +
                        " evaluations");
    }
    const GainBias gb = solve_gain_bias(g, sigma1, StationaryStrategy::positional(g, 2, sol.policy), t);
    ++sol.iterations;
    sol.gain = gb.gain;
    sol.potentials = gb.potentials;
    sol.gain_history.push_back(gb.gain);

    bool changed = false;
    for (StateIndex s = 0; s < n; ++s) {
      const std::vector<double> q = lookahead(g, sigma1, s, sol.potentials);
      const auto best = static_cast<ActionIndex>(std::min_element(q.begin(), q.end()) - q.begin());
      if (q[best] < q[sol.policy[s]] - tol) {
        sol.policy[s] = best;
        changed = true;
      }
    }
    if (!changed) return sol;
  }
}

double min_equation_residual(const Game& g, const StationaryStrategy& sigma1, const PotentialSolution& sol) {
  double worst = 0.0;
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    const std::vector<double> q = lookahead(g, sigma1, s, sol.potentials);
    const double best = *std::min_element(q.begin(), q.end());
    worst = std::max(worst, std::abs(sol.gain + sol.potentials[s] - best));
  }
  return worst;
}

}  // namespace cmpg
