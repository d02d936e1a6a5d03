#include <algorithm>
#include <climits>

#include "cmpg/error.hpp"
#include "cmpg/solvers.hpp"
#include "parallel.hpp"

namespace cmpg {

MatrixGame lookahead_matrix(const Game& g, StateIndex s, const std::vector<double>& potentials) {
  const std::size_t m1 = g.num_actions1(s), m2 = g.num_actions2(s);
  std::vector<double> entries(m1 * m2);
  for (ActionIndex a1 = 0; a1 < m1; ++a1) {
    for (ActionIndex a2 = 0; a2 < m2; ++a2) {
      const FloatTransition& t = g.float_transition(s, a1, a2);
      double v = t.reward;
      for (const auto& [to, p] : t.successors) v += p * potentials[to];
      entries[a1 * m2 + a2] = v;
    }
  }
  return MatrixGame(m1, m2, std::move(entries));
}

namespace {

// Most even composition of q into `len` parts.
std::vector<std::int64_t> initial_counts(std::size_t len, std::int64_t q) {
  const auto l = static_cast<std::int64_t>(len);
  if (q >= l) {
    std::vector<Rational> uniform(len, Rational(BigInt(1), BigInt(static_cast<long>(len))));
    return round_distribution(uniform, q).counts;
  }
  std::vector<std::int64_t> counts(len, 0);
  for (std::int64_t i = 0; i < l; ++i) counts[static_cast<std::size_t>(i)] = q / l + (i < q % l ? 1 : 0);
  return counts;
}

StationaryStrategy from_counts(const std::vector<std::vector<std::int64_t>>& counts, std::int64_t q) {
  std::vector<std::vector<Rational>> exact(counts.size());
  for (std::size_t s = 0; s < counts.size(); ++s) {
    for (std::int64_t c : counts[s]) exact[s].emplace_back(BigInt(static_cast<long>(c)), BigInt(static_cast<long>(q)));
  }
  return StationaryStrategy::from_exact(1, std::move(exact));
}

}  // namespace

StrategyIterationResult var_hoffman_karp(const Game& g, const Rational& epsilon, StateIndex t,
                                         const StrategyIterationOptions& options) {
  const std::size_t n = g.num_states();
  if (t >= n) throw PreconditionError("anchor state out of range");
  if (epsilon.sign() <= 0) throw PreconditionError("epsilon must be positive");
  const GameStats stats = compute_stats(g);

  StrategyIterationResult out;
  if (options.q) {
    if (*options.q < 1) throw PreconditionError("q must be at least 1");
    out.q = *options.q;
  } else {
    const BigInt q = q_from_epsilon(stats, epsilon / g.reward_scale());
    if (!q.fits_slong_p()) {
      throw SolverError("q = " + q.get_str() + " derived from epsilon is too large to enumerate; pass an explicit q");
    }
    out.q = q.get_si();
  }
  const Rational bound = Rational(4) * Rational(static_cast<long>(stats.m)) *
                         Rational(static_cast<long>(stats.n * stats.n)) *
                         stats.delta_min.pow(-static_cast<long>(stats.r)) * g.reward_scale() /
                         Rational(static_cast<long>(out.q));
  out.epsilon_guarantee = bound.to_double();

  std::vector<std::vector<std::int64_t>> counts(n);
  for (StateIndex s = 0; s < n; ++s) counts[s] = initial_counts(g.num_actions1(s), out.q);
  StationaryStrategy sigma = from_counts(counts, out.q);

  for (;;) {
    if (out.iterations >= options.max_iterations) {
      throw SolverError("strategy iteration exceeded the cap of " + std::to_string(options.max_iterations) +
                        " iterations");
    }
    PotentialSolution pot = best_response_potentials(g, sigma, t, options.response_iterations);
    ++out.iterations;
    out.gains.push_back(pot.gain);

    std::vector<std::optional<std::vector<std::int64_t>>> replacement(n);
    detail::parallel_for(n, options.threads, [&](std::size_t s) {
      const MatrixGame m = lookahead_matrix(g, s, pot.potentials);
      const double current = guaranteed_value(m, sigma.at(s));
      const BestQRounded best = best_q_rounded(m, out.q, options.node_budget);
      if (current < best.value - options.lp_tol * (1.0 + m.max_abs_entry())) replacement[s] = best.x.counts;
    });

    StrategyIterationTrace step{out.iterations, pot.gain, {}, {}};
    if (options.trace) step.strategy = sigma;
    for (StateIndex s = 0; s < n; ++s) {
      if (replacement[s]) {
        counts[s] = std::move(*replacement[s]);
        step.changed.push_back(s);
      }
    }
    const bool fixed_point = step.changed.empty();
    if (options.trace) out.trace.push_back(std::move(step));
    if (fixed_point) {
      out.strategy = std::move(sigma);
      out.gain = pot.gain;
      out.potentials = std::move(pot);
      return out;
    }
    sigma = from_counts(counts, out.q);
  }
}

HoffmanKarpResult hoffman_karp(const Game& g, StateIndex t, double tol, std::size_t max_iterations) {
  const std::size_t n = g.num_states();
  if (t >= n) throw PreconditionError("anchor state out of range");
  HoffmanKarpResult out;
  out.strategy = StationaryStrategy::uniform(g, 1);
  out.strategy.exact.reset();
  const double scale = 1.0 + g.reward_scale_double();
  for (;;) {
    out.potentials = best_response_potentials(g, out.strategy, t);
    ++out.iterations;
    bool changed = false;
    for (StateIndex s = 0; s < n; ++s) {
      const MatrixGame m = lookahead_matrix(g, s, out.potentials.potentials);
      const MatrixGameSolution sol = solve_matrix_game(m);
      if (guaranteed_value(m, out.strategy.at(s)) < sol.value - tol * scale) {
        out.strategy.probabilities[s] = sol.row_strategy;
        changed = true;
      }
    }
    if (!changed) break;
    if (out.iterations >= max_iterations) {
      out.potentials = best_response_potentials(g, out.strategy, t);
      break;
    }
  }
  out.column_strategies.resize(n);
  for (StateIndex s = 0; s < n; ++s) {
    out.column_strategies[s] = solve_matrix_game(lookahead_matrix(g, s, out.potentials.potentials)).col_strategy;
  }
  return out;
}

}  // namespace cmpg
