#include <algorithm>
#include <limits>

#include "cmpg/error.hpp"
#include "cmpg/solvers.hpp"
#include "linalg.hpp"

namespace cmpg {

namespace {

std::vector<bool> forward_reach(const InducedChain& chain, StateIndex from, std::optional<StateIndex> stop = {}) {
  std::vector<bool> seen(chain.reward.size(), false);
  std::vector<StateIndex> todo{from};
  seen[from] = true;
  while (!todo.empty()) {
    const StateIndex s = todo.back();
    todo.pop_back();
    if (stop && s == *stop) continue;
    for (const auto& [to, p] : chain.next[s]) {
      if (p > 0.0 && !seen[to]) {
        seen[to] = true;
        todo.push_back(to);
      }
    }
  }
  return seen;
}

}  // namespace

Rational hitting_bound(const GameStats& stats) {
  return Rational(static_cast<long>(stats.n)) * stats.delta_min.pow(-static_cast<long>(stats.r));
}

double evaluate_profile(const Game& g, const StationaryStrategy& sigma1, const StationaryStrategy& sigma2,
                        StateIndex s) {
  if (s >= g.num_states()) throw PreconditionError("state out of range");
  if (sigma1.player != 1 || sigma2.player != 2) throw PreconditionError("evaluate_profile expects (Player 1, Player 2)");
  validate_strategy(g, sigma1);
  validate_strategy(g, sigma2);
  const InducedChain chain = induced_chain(g, sigma1, sigma2);
  const std::vector<bool> seen = forward_reach(chain, s);
  std::vector<StateIndex> sub;
  for (StateIndex x = 0; x < g.num_states(); ++x) {
    if (seen[x]) sub.push_back(x);
  }
  return chain_gain_bias(chain, s, sub).gain;
}

double hitting_time(const Game& g, const StationaryStrategy& sigma1, const StationaryStrategy& sigma2,
                    StateIndex s, StateIndex t) {
  const std::size_t n = g.num_states();
  if (s >= n || t >= n) throw PreconditionError("state out of range");
  if (s == t) return 0.0;
  const InducedChain chain = induced_chain(g, sigma1, sigma2);

  // States that can still reach t; every state visited before t must be one.
  std::vector<bool> reaches(n, false);
  reaches[t] = true;
  for (bool changed = true; changed;) {
    changed = false;
    for (StateIndex x = 0; x < n; ++x) {
      if (reaches[x]) continue;
      for (const auto& [to, p] : chain.next[x]) {
        if (p > 0.0 && reaches[to]) {
          reaches[x] = true;
          changed = true;
          break;
        }
      }
    }
  }
  const std::vector<bool> seen = forward_reach(chain, s, t);
  std::vector<StateIndex> sub;
  std::vector<std::size_t> pos(n, n);
  for (StateIndex x = 0; x < n; ++x) {
    if (!seen[x] || x == t) continue;
    if (!reaches[x]) return std::numeric_limits<double>::infinity();
    pos[x] = sub.size();
    sub.push_back(x);
  }
  // h_x = 1 + sum_{y != t} P(x, y) h_y
  const std::size_t k = sub.size();
  std::vector<double> a(k * k, 0.0), b(k, 1.0);
  for (std::size_t i = 0; i < k; ++i) {
    a[i * k + i] += 1.0;
    for (const auto& [to, p] : chain.next[sub[i]]) {
      if (to != t) a[i * k + pos[to]] -= p;
    }
  }
  return detail::lu_solve(a, b, k)[pos[s]];
}

}  // namespace cmpg
