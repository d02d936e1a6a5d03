#include <gtest/gtest.h>

#include <random>

#include "cmpg/error.hpp"
#include "cmpg/matrix_game.hpp"
#include "test_util.hpp"

using namespace cmpg;
using cmpg::testing::frac;

namespace {

std::vector<Rational> rationals(std::initializer_list<std::pair<long, long>> xs) {
  std::vector<Rational> out;
  for (auto [p, q] : xs) out.push_back(frac(p, q));
  return out;
}

std::vector<std::vector<double>> to_double(const std::vector<std::vector<Rational>>& m) {
  std::vector<std::vector<double>> out;
  for (const auto& row : m) {
    out.emplace_back();
    for (const auto& x : row) out.back().push_back(x.to_double());
  }
  return out;
}

double column_side(const std::vector<std::vector<double>>& m, const std::vector<double>& y) {
  double worst = -1e300;
  for (std::size_t i = 0; i < m.size(); ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) v += m[i][j] * y[j];
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace

TEST(SolveMatrixGame, Examples) {
  const MatrixGameSolution c = solve_matrix_game(MatrixGame(std::vector<std::vector<double>>{{2.5}}));
  EXPECT_DOUBLE_EQ(c.value, 2.5);
  EXPECT_EQ(c.row_strategy, std::vector<double>{1.0});
  EXPECT_EQ(c.col_strategy, std::vector<double>{1.0});

  const MatrixGameSolution id = solve_matrix_game(MatrixGame({{1, 0}, {0, 1}}));
  EXPECT_NEAR(id.value, 0.5, 1e-12);
  EXPECT_NEAR(id.row_strategy[0], 0.5, 1e-12);
  EXPECT_NEAR(id.col_strategy[1], 0.5, 1e-12);

  // 2x2 without a saddle point: (ad - bc) / (a + d - b - c)
  const MatrixGameSolution m = solve_matrix_game(MatrixGame({{3, 1}, {0, 2}}));
  EXPECT_NEAR(m.value, (3.0 * 2 - 1 * 0) / (3.0 + 2 - 1 - 0), 1e-12);
  EXPECT_NEAR(m.row_strategy[0], 0.5, 1e-12);
}

TEST(SolveMatrixGame, SaddlePointAndNegativeEntries) {
  const MatrixGameSolution s = solve_matrix_game(MatrixGame({{-4, -2}, {-1, -3}, {-5, -6}}));
  // no saddle: rows 0 and 1 mix, value -2.5
  EXPECT_NEAR(s.value, -2.5, 1e-12);
  EXPECT_NEAR(s.row_strategy[2], 0.0, 1e-12);
}

TEST(RoundDistribution, Examples) {
  const auto a = rationals({{3, 5}, {2, 5}});
  EXPECT_EQ(round_distribution(a, 5).counts, (std::vector<std::int64_t>{3, 2}));
  const auto b = rationals({{1, 3}, {1, 3}, {1, 3}});
  EXPECT_EQ(round_distribution(b, 4).counts, (std::vector<std::int64_t>{1, 2, 1}));
  const auto c = rationals({{19, 20}, {3, 100}, {1, 50}});
  EXPECT_EQ(round_distribution(c, 10).counts, (std::vector<std::int64_t>{10, 0, 0}));
}

TEST(RoundDistribution, Errors) {
  const auto b = rationals({{1, 3}, {1, 3}, {1, 3}});
  EXPECT_THROW(round_distribution(b, 2), PreconditionError);
  const auto bad = rationals({{1, 3}, {1, 3}});
  EXPECT_THROW(round_distribution(bad, 4), PreconditionError);
}

TEST(BestQRounded, Examples) {
  const MatrixGame id = MatrixGame::exact({{1, 0}, {0, 1}});
  const BestQRounded two = best_q_rounded(id, 2);
  EXPECT_EQ(two.x.counts, (std::vector<std::int64_t>{1, 1}));
  EXPECT_EQ(*two.exact_value, frac(1, 2));
  const BestQRounded one = best_q_rounded(id, 1);
  EXPECT_EQ(one.x.counts, (std::vector<std::int64_t>{0, 1}));
  EXPECT_EQ(*one.exact_value, Rational(0));

  const BestQRounded m = best_q_rounded(MatrixGame::exact({{3, 1}, {0, 2}}), 4);
  EXPECT_EQ(m.x.counts, (std::vector<std::int64_t>{2, 2}));
  EXPECT_EQ(*m.exact_value, frac(3, 2));
}

TEST(BestQRounded, NodeBudgetGuard) {
  // A flat matrix leaves nothing to prune.
  std::vector<std::vector<Rational>> flat(6, std::vector<Rational>(2, Rational(1)));
  EXPECT_THROW(best_q_rounded(MatrixGame::exact(flat), 60, 1000), SolverError);
}

TEST(QFromEpsilon, Examples) {
  GameStats a{2, 2, 1, frac(1, 2)};
  EXPECT_EQ(q_from_epsilon(a, 1), 64);
  EXPECT_EQ(q_from_epsilon(a, 2), 32);
  GameStats b{1, 1, 0, Rational(1)};
  EXPECT_EQ(q_from_epsilon(b, frac(1, 2)), 8);
  EXPECT_EQ(q_from_epsilon(a, frac(3, 1000)), 21334);  // 64000/3 rounded up
}

// --- properties -------------------------------------------------------------

TEST(MatrixProperties, LpDuality) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 300; ++i) {
    const std::size_t r = 1 + rng() % 5, c = 1 + rng() % 5;
    const auto m = to_double(cmpg::testing::random_rational_matrix(rng, r, c, -100, 100, 10));
    const MatrixGameSolution s = solve_matrix_game(MatrixGame(m));
    const double tol = 1e-9 * (1.0 + 10.0);
    const double lo = cmpg::testing::double_guarantee(m, s.row_strategy);
    const double hi = column_side(m, s.col_strategy);
    EXPECT_GE(lo, s.value - tol);
    EXPECT_LE(hi, s.value + tol);
    EXPECT_LE(std::abs(hi - lo), 2 * tol);
  }
}

TEST(MatrixProperties, RoundingIsExact) {
  std::mt19937_64 rng(32);
  for (int i = 0; i < 400; ++i) {
    const std::size_t len = 1 + rng() % 6;
    const long den = 1 + static_cast<long>(rng() % 97);
    auto d = cmpg::testing::random_distribution(rng, len, std::max<long>(den, 1), false);
    for (std::int64_t q = static_cast<std::int64_t>(len); q <= 4 * static_cast<std::int64_t>(len); ++q) {
      const QRoundedDistribution out = round_distribution(d, q);
      ASSERT_EQ(out.counts.size(), len);
      std::int64_t sum = 0;
      for (std::size_t k = 0; k < len; ++k) {
        EXPECT_GE(out.counts[k], 0);
        sum += out.counts[k];
        const Rational diff = (d[k] - frac(static_cast<long>(out.counts[k]), static_cast<long>(q))).abs();
        EXPECT_LT(diff, frac(1, static_cast<long>(q)));
      }
      EXPECT_EQ(sum, q);
    }
  }
}

TEST(MatrixProperties, BestQRoundedMatchesEnumeration) {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 300; ++i) {
    const std::size_t r = 1 + rng() % 3, c = 1 + rng() % 3;
    const auto m = cmpg::testing::random_rational_matrix(rng, r, c, -6, 6, 1 + static_cast<long>(rng() % 3));
    const std::int64_t q = 1 + static_cast<std::int64_t>(rng() % 12);
    const BestQRounded got = best_q_rounded(MatrixGame::exact(m), q);
    const cmpg::testing::BruteRounded want = cmpg::testing::brute_q_rounded(m, q);
    EXPECT_EQ(*got.exact_value, want.value);
    EXPECT_EQ(got.x.counts, want.counts);
  }
}

TEST(MatrixProperties, BestQRoundedBoundsAndRefinement) {
  std::mt19937_64 rng(34);
  for (int i = 0; i < 150; ++i) {
    const std::size_t r = 2 + rng() % 3, c = 1 + rng() % 4;
    const auto mr = cmpg::testing::random_rational_matrix(rng, r, c, -10, 10, 1);
    const auto md = to_double(mr);
    const MatrixGame m = MatrixGame::exact(mr);
    const MatrixGameSolution lp = solve_matrix_game(m);
    const double tol = matrix_tolerance(m.max_abs_entry());
    const std::int64_t q = static_cast<std::int64_t>(r) + static_cast<std::int64_t>(rng() % 8);
    const BestQRounded best = best_q_rounded(m, q);
    EXPECT_LE(best.value, lp.value + tol);

    std::vector<Rational> x;
    Rational total;
    for (std::size_t k = 0; k + 1 < r; ++k) {
      x.push_back(Rational::from_double(lp.row_strategy[k]));
      total += x.back();
    }
    x.push_back(Rational(1) - total);
    if (x.back().sign() >= 0) {
      const QRoundedDistribution rounded = round_distribution(x, q);
      EXPECT_GE(best.value, cmpg::testing::double_guarantee(md, rounded.probabilities_double()) - 1e-12);
    }
    const BestQRounded doubled = best_q_rounded(m, 2 * q);
    EXPECT_GE(*doubled.exact_value, *best.exact_value);
  }
}

TEST(MatrixProperties, DoubleModeAgreesWithExact) {
  std::mt19937_64 rng(35);
  for (int i = 0; i < 100; ++i) {
    const auto mr = cmpg::testing::random_rational_matrix(rng, 3, 3, -20, 20, 4);
    const std::int64_t q = 1 + static_cast<std::int64_t>(rng() % 12);
    const BestQRounded exact = best_q_rounded(MatrixGame::exact(mr), q);
    const BestQRounded approx = best_q_rounded(MatrixGame(to_double(mr)), q);
    EXPECT_NEAR(approx.value, exact.exact_value->to_double(), 1e-12);
    EXPECT_EQ(approx.x.counts, exact.x.counts);
  }
}
