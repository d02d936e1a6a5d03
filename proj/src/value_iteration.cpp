#include <algorithm>
#include <cmath>
#include <limits>

#include "cmpg/error.hpp"
#include "cmpg/solvers.hpp"
#include "parallel.hpp"

namespace cmpg {

namespace {

Bracket min_max(const std::vector<double>& xs) {
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  return {*lo, *hi};
}

Bracket intersect(const Bracket& a, const Bracket& b) {
  Bracket out{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
  // Disjoint only on non-ergodic games or through rounding; fall back to the
  // bracket that is valid for every game.
  if (out.lo > out.hi) return b;
  return out;
}

}  // namespace

ValueIterationResult value_iteration(const Game& g, const ValueIterationOptions& options) {
  if (options.steps < 1) throw PreconditionError("value iteration needs T >= 1");
  const std::size_t n = g.num_states();
  const double w = g.reward_scale_double();

  std::vector<double> prev(n, 0.0), cur(n, 0.0), inc(n, 0.0);
  ValueIterationResult out;
  const unsigned threads = n >= 32 ? options.threads : 1;
  for (std::int64_t j = 1; j <= options.steps; ++j) {
    const double jd = static_cast<double>(j);
    const double carry = static_cast<double>(j - 1);
    detail::parallel_for(n, threads, [&](std::size_t s) {
      const std::size_t m1 = g.num_actions1(s), m2 = g.num_actions2(s);
      std::vector<double> entries(m1 * m2);
      for (ActionIndex a1 = 0; a1 < m1; ++a1) {
        for (ActionIndex a2 = 0; a2 < m2; ++a2) {
          const FloatTransition& t = g.float_transition(s, a1, a2);
          double future = 0.0;
          for (const auto& [to, p] : t.successors) future += p * prev[to];
          entries[a1 * m2 + a2] = (t.reward / w + carry * future) / jd;
        }
      }
      cur[s] = solve_matrix_game(MatrixGame(m1, m2, std::move(entries))).value;
      inc[s] = jd * cur[s] - carry * prev[s];
    });
    std::swap(prev, cur);
    out.steps = j;
    const Bracket avg = min_max(prev);
    const Bracket step = min_max(inc);
    const Bracket tight = intersect(avg, step);
    if (options.trace) out.trace.push_back({j, {avg.lo * w, avg.hi * w}, {tight.lo * w, tight.hi * w}});
    if (options.stop_width > 0.0 && tight.width() * w <= options.stop_width) break;
  }

  out.values.resize(n);
  for (std::size_t s = 0; s < n; ++s) out.values[s] = prev[s] * w;
  out.bracket = min_max(out.values);
  const Bracket step = min_max(inc);
  out.increment = {step.lo * w, step.hi * w};
  out.tight = intersect(out.bracket, out.increment);
  return out;
}

std::int64_t vi_steps_for_epsilon(const GameStats& stats, const Rational& reward_scale, const Rational& epsilon) {
  if (epsilon.sign() <= 0) throw PreconditionError("epsilon must be positive");
  const Rational c = Rational(2) * reward_scale / epsilon;
  const Rational h = hitting_bound(stats);
  const double lg = std::log2(c.to_double());
  if (lg <= 0.0) return 1;
  const double steps = (Rational(4) * h * c).to_double() * lg;
  if (!(steps < 9.2e18)) return std::numeric_limits<std::int64_t>::max();
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(steps)));
}

}  // namespace cmpg
