#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cmpg/game.hpp"
#include "cmpg/rational.hpp"

namespace cmpg {

// Dense zero-sum matrix game; the row player maximises. An exact mirror of
// the entries may be attached, in which case q-rounded search is exact.
class MatrixGame {
 public:
  MatrixGame(std::size_t rows, std::size_t cols, std::vector<double> entries);
  explicit MatrixGame(const std::vector<std::vector<double>>& rows);
  static MatrixGame exact(const std::vector<std::vector<Rational>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  bool has_exact() const { return exact_.has_value(); }
  const Rational& exact_at(std::size_t i, std::size_t j) const { return (*exact_)[i * cols_ + j]; }
  double max_abs_entry() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> entries_;
  std::optional<std::vector<Rational>> exact_;
};

struct MatrixGameSolution {
  double value = 0.0;
  std::vector<double> row_strategy;  // x
  std::vector<double> col_strategy;  // y
};

// Default LP tolerance for a matrix with the given largest |entry|.
double matrix_tolerance(double max_abs_entry);

// Optimal mixed strategies through the primal/dual matrix-game LP (dense
// simplex, Bland's rule). x guarantees >= value - tol against every column,
// y concedes <= value + tol against every row.
MatrixGameSolution solve_matrix_game(const MatrixGame& m);

// min_j sum_i x_i M[i][j]
double guaranteed_value(const MatrixGame& m, std::span<const double> row_strategy);

// q-rounded distribution: counts summing to q.
struct QRoundedDistribution {
  std::int64_t q = 1;
  std::vector<std::int64_t> counts;

  std::vector<Rational> probabilities() const;
  std::vector<double> probabilities_double() const;
};

// Rounds d to a q-rounded distribution with |d(z) - out(z)| < 1/q
// componentwise. Deterministic: the anchor is the lowest-index element with
// 1/q <= d(z) <= 1 - 1/q, the others are processed in index order.
// Throws PreconditionError when q < |d| or d is not a distribution.
QRoundedDistribution round_distribution(std::span<const Rational> d, std::int64_t q);

struct BestQRounded {
  double value = 0.0;
  std::optional<Rational> exact_value;  // set when the matrix carries exact entries
  QRoundedDistribution x;
  std::uint64_t nodes = 0;
};

// Default branch-and-bound node budget.
inline constexpr std::uint64_t kDefaultNodeBudget = 10'000'000;

// Best q-rounded row strategy: maximises min_j x^T M[., j] over all
// compositions of q into |rows| parts, ties to the lexicographically smallest
// count vector. Branch-and-bound over compositions pruned with LP relaxation
// bounds; exact when the matrix has an exact mirror. Throws SolverError when
// the search exceeds `node_budget` nodes.
BestQRounded best_q_rounded(const MatrixGame& m, std::int64_t q,
                            std::uint64_t node_budget = kDefaultNodeBudget);

// ceil(4 * m * n^2 * delta_min^-r / epsilon), exact before the ceiling.
BigInt q_from_epsilon(const GameStats& stats, const Rational& epsilon);

}  // namespace cmpg
