#include "cmpg/matrix_game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmpg/error.hpp"

namespace cmpg {

MatrixGame::MatrixGame(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows_ == 0 || cols_ == 0) throw PreconditionError("matrix game needs at least one row and column");
  if (entries_.size() != rows_ * cols_) throw PreconditionError("matrix game entry count mismatch");
  for (double e : entries_) {
    if (!std::isfinite(e)) throw PreconditionError("matrix game entries must be finite");
  }
}

MatrixGame::MatrixGame(const std::vector<std::vector<double>>& rows)
    : MatrixGame(rows.size(), rows.empty() ? 0 : rows.front().size(), [&] {
        std::vector<double> flat;
        for (const auto& r : rows) {
          if (r.size() != rows.front().size()) throw PreconditionError("ragged matrix game");
          flat.insert(flat.end(), r.begin(), r.end());
        }
        return flat;
      }()) {}

MatrixGame MatrixGame::exact(const std::vector<std::vector<Rational>>& rows) {
  std::vector<std::vector<double>> approx;
  std::vector<Rational> flat;
  for (const auto& r : rows) {
    approx.emplace_back();
    for (const Rational& x : r) {
      approx.back().push_back(x.to_double());
      flat.push_back(x);
    }
  }
  MatrixGame m(approx);
  m.exact_ = std::move(flat);
  return m;
}

double MatrixGame::max_abs_entry() const {
  double out = 0.0;
  for (double e : entries_) out = std::max(out, std::abs(e));
  return out;
}

double matrix_tolerance(double max_abs_entry) { return 1e-9 * (1.0 + max_abs_entry); }

double guaranteed_value(const MatrixGame& m, std::span<const double> row_strategy) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double v = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) v += row_strategy[i] * m(i, j);
    worst = std::min(worst, v);
  }
  return worst;
}

namespace {

void normalize(std::vector<double>& d) {
  double total = 0.0;
  for (double& p : d) {
    p = std::max(p, 0.0);
    total += p;
  }
  for (double& p : d) p /= total;
}

// max sum(u) s.t. A u <= 1, u >= 0 for a strictly positive A, by tableau
// simplex with Bland's rule. Returns u and the dual t (A^T t >= 1).
struct PackingSolution {
  std::vector<double> primal;
  std::vector<double> dual;
  double objective = 0.0;
};

PackingSolution solve_packing_lp(const MatrixGame& a, double shift) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  const std::size_t width = n + m + 1;  // structural, slack, rhs
  std::vector<double> tab(m * width, 0.0);
  std::vector<double> cost(n + m, 0.0);  // reduced costs
  std::vector<std::size_t> basis(m);
  double scale = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      tab[i * width + j] = a(i, j) + shift;
      scale = std::max(scale, tab[i * width + j]);
    }
    tab[i * width + n + i] = 1.0;
    tab[i * width + n + m] = 1.0;
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) cost[j] = 1.0;
  double objective = 0.0;
  const double eps = 1e-12 * std::max(1.0, scale);

  for (std::size_t iter = 0;; ++iter) {
    if (iter > 50 * (n + m) + 1000) throw SolverError("simplex did not terminate");
    std::size_t enter = n + m;
    for (std::size_t j = 0; j < n + m; ++j) {
      if (cost[j] > 1e-12) {
        enter = j;
        break;
      }
    }
    if (enter == n + m) break;
    std::size_t leave = m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double coef = tab[i * width + enter];
      if (coef <= eps) continue;
      const double ratio = tab[i * width + n + m] / coef;
      if (ratio < best_ratio - 1e-15 ||
          (ratio <= best_ratio + 1e-15 && leave < m && basis[i] < basis[leave])) {
        if (ratio < best_ratio) best_ratio = ratio;
        leave = i;
      }
    }
    if (leave == m) throw SolverError("matrix game LP unbounded (internal error)");
    const double pivot = tab[leave * width + enter];
    for (std::size_t j = 0; j < width; ++j) tab[leave * width + j] /= pivot;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave) continue;
      const double factor = tab[i * width + enter];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) tab[i * width + j] -= factor * tab[leave * width + j];
    }
    const double factor = cost[enter];
    for (std::size_t j = 0; j < n + m; ++j) cost[j] -= factor * tab[leave * width + j];
    objective += factor * tab[leave * width + n + m];
    basis[leave] = enter;
  }

  PackingSolution out;
  out.primal.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) out.primal[basis[i]] = tab[i * width + n + m];
  }
  out.dual.resize(m);
  for (std::size_t i = 0; i < m; ++i) out.dual[i] = std::max(0.0, -cost[n + i]);
  out.objective = objective;
  return out;
}

}  // namespace

MatrixGameSolution solve_matrix_game(const MatrixGame& m) {
  MatrixGameSolution out;
  if (m.rows() == 1 || m.cols() == 1) {
    // Degenerate games: one player has a single pure strategy.
    out.row_strategy.assign(m.rows(), 0.0);
    out.col_strategy.assign(m.cols(), 0.0);
    if (m.rows() == 1) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < m.cols(); ++j) {
        if (m(0, j) < m(0, best)) best = j;
      }
      out.row_strategy[0] = 1.0;
      out.col_strategy[best] = 1.0;
      out.value = m(0, best);
    } else {
      std::size_t best = 0;
      for (std::size_t i = 1; i < m.rows(); ++i) {
        if (m(i, 0) > m(best, 0)) best = i;
      }
      out.row_strategy[best] = 1.0;
      out.col_strategy[0] = 1.0;
      out.value = m(best, 0);
    }
    return out;
  }

  double lo = m(0, 0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) lo = std::min(lo, m(i, j));
  }
  const double shift = 1.0 - lo;  // shifted entries are >= 1
  PackingSolution lp = solve_packing_lp(m, shift);
  const double shifted_value = 1.0 / lp.objective;
  out.col_strategy = lp.primal;
  out.row_strategy = lp.dual;
  normalize(out.col_strategy);
  normalize(out.row_strategy);
  out.value = shifted_value - shift;
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Rational> QRoundedDistribution::probabilities() const {
  std::vector<Rational> out;
  for (std::int64_t c : counts) out.emplace_back(BigInt(static_cast<long>(c)), BigInt(static_cast<long>(q)));
  return out;
}

std::vector<double> QRoundedDistribution::probabilities_double() const {
  std::vector<double> out;
  for (std::int64_t c : counts) out.push_back(static_cast<double>(c) / static_cast<double>(q));
  return out;
}

QRoundedDistribution round_distribution(std::span<const Rational> d, std::int64_t q) {
  const std::size_t len = d.size();
  if (len == 0) throw PreconditionError("cannot round an empty distribution");
  if (q < static_cast<std::int64_t>(len)) throw PreconditionError("round_distribution needs q >= support size");
  Rational total;
  for (const Rational& p : d) {
    if (p.sign() < 0) throw PreconditionError("negative probability in round_distribution");
    total += p;
  }
  if (total != Rational(1)) throw PreconditionError("round_distribution input does not sum to 1");

  QRoundedDistribution out;
  out.q = q;
  out.counts.assign(len, 0);
  if (len == 1) {
    out.counts[0] = q;
    return out;
  }
  const Rational qr(static_cast<long>(q));
  const Rational lo = qr.inverse();
  const Rational hi = Rational(1) - lo;

  std::size_t anchor = len;
  for (std::size_t z = 0; z < len; ++z) {
    if (d[z] >= lo && d[z] <= hi) {
      anchor = z;
      break;
    }
  }
  if (anchor == len) {
    // Every element is below 1/q or above 1 - 1/q; exactly one is above.
    for (std::size_t z = 0; z < len; ++z) {
      if (d[z] > hi) {
        out.counts[z] = q;
        return out;
      }
    }
    throw SolverError("round_distribution: no dominant element (internal error)");
  }

  Rational deficit;  // sum of d(z) - out(z) over the elements placed so far
  std::int64_t placed = 0;
  for (std::size_t z = 0; z < len; ++z) {
    if (z == anchor) continue;
    const Rational scaled = d[z] * qr;
    const BigInt c = deficit.sign() < 0 ? scaled.floor() : scaled.ceil();
    out.counts[z] = c.get_si();
    placed += out.counts[z];
    deficit += d[z] - Rational(c, BigInt(static_cast<long>(q)));
  }
  out.counts[anchor] = q - placed;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

template <class Num>
struct CompositionSearch {
  const MatrixGame& game;
  std::int64_t q;
  std::uint64_t budget;
  std::vector<std::vector<Num>> entries;
  double tie_tol;
  double prune_tol;

  std::vector<std::int64_t> counts;
  std::vector<std::int64_t> best_counts;
  Num best_value{};
  bool have_best = false;
  std::uint64_t nodes = 0;

  static Num from_count(std::int64_t c) {
    if constexpr (std::is_same_v<Num, double>) {
      return static_cast<double>(c);
    } else {
      return Rational(static_cast<long>(c));
    }
  }

  static double as_double(const Num& x) {
    if constexpr (std::is_same_v<Num, double>) {
      return x;
    } else {
      return x.to_double();
    }
  }

  bool strictly_better(const Num& candidate) const {
    if (!have_best) return true;
    if constexpr (std::is_same_v<Num, double>) {
      return candidate > best_value + tie_tol;
    } else {
      return candidate > best_value;
    }
  }

  // Upper bound on any completion: the unrestricted matrix game over the
  // remaining rows with the fixed part folded into every column.
  double relaxation_bound(std::size_t row, std::int64_t remaining, const std::vector<Num>& colsum) const {
    const std::size_t rows_left = game.rows() - row;
    std::vector<double> flat(rows_left * game.cols());
    const double qd = static_cast<double>(q);
    const double rho = static_cast<double>(remaining) / qd;
    for (std::size_t k = 0; k < rows_left; ++k) {
      for (std::size_t j = 0; j < game.cols(); ++j) {
        flat[k * game.cols() + j] = as_double(colsum[j]) / qd + rho * game(row + k, j);
      }
    }
    return solve_matrix_game(MatrixGame(rows_left, game.cols(), std::move(flat))).value;
  }

  void visit(std::size_t row, std::int64_t remaining, const std::vector<Num>& colsum) {
    if (++nodes > budget) {
      throw SolverError("best_q_rounded exceeded the node budget of " + std::to_string(budget) +
                        " (q = " + std::to_string(q) + ", rows = " + std::to_string(game.rows()) + ")");
    }
    const std::size_t last = game.rows() - 1;
    if (row == last) {
      counts[row] = remaining;
      Num value{};
      bool first = true;
      const Num rem = from_count(remaining);
      for (std::size_t j = 0; j < game.cols(); ++j) {
        Num v = colsum[j] + rem * entries[row][j];
        if (first || v < value) {
          value = v;
          first = false;
        }
      }
      value = value / from_count(q);
      if (strictly_better(value)) {
        best_value = value;
        best_counts = counts;
        have_best = true;
      }
      return;
    }
    if (have_best && remaining > 0 && relaxation_bound(row, remaining, colsum) < as_double(best_value) - prune_tol) {
      return;
    }
    std::vector<Num> next(colsum.size());
    for (std::int64_t c = 0; c <= remaining; ++c) {
      counts[row] = c;
      const Num cn = from_count(c);
      for (std::size_t j = 0; j < game.cols(); ++j) next[j] = colsum[j] + cn * entries[row][j];
      visit(row + 1, remaining - c, next);
    }
    counts[row] = 0;
  }
};

template <class Num>
BestQRounded run_search(const MatrixGame& m, std::int64_t q, std::uint64_t budget) {
  CompositionSearch<Num> search{m, q, budget, {}, 0.0, 0.0, {}, {}, Num{}, false, 0};
  search.entries.assign(m.rows(), std::vector<Num>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if constexpr (std::is_same_v<Num, double>) {
        search.entries[i][j] = m(i, j);
      } else {
        search.entries[i][j] = m.exact_at(i, j);
      }
    }
  }
  const double scale = 1.0 + m.max_abs_entry();
  search.tie_tol = 1e-12 * scale;
  search.prune_tol = matrix_tolerance(m.max_abs_entry());
  search.counts.assign(m.rows(), 0);
  search.visit(0, q, std::vector<Num>(m.cols(), Num{}));

  BestQRounded out;
  out.x.q = q;
  out.x.counts = search.best_counts;
  out.nodes = search.nodes;
  if constexpr (std::is_same_v<Num, double>) {
    out.value = search.best_value;
  } else {
    out.exact_value = search.best_value;
    out.value = search.best_value.to_double();
  }
  return out;
}

}  // namespace

BestQRounded best_q_rounded(const MatrixGame& m, std::int64_t q, std::uint64_t node_budget) {
  if (q < 1) throw PreconditionError("best_q_rounded needs q >= 1");
  if (m.has_exact()) return run_search<Rational>(m, q, node_budget);
  return run_search<double>(m, q, node_budget);
}

BigInt q_from_epsilon(const GameStats& stats, const Rational& epsilon) {
  if (epsilon.sign() <= 0) throw PreconditionError("epsilon must be positive");
  const Rational n(static_cast<long>(stats.n));
  const Rational bound = Rational(4) * Rational(static_cast<long>(stats.m)) * n * n *
                         stats.delta_min.pow(-static_cast<long>(stats.r)) / epsilon;
  return bound.ceil();
}

}  // namespace cmpg
