#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cmpg/error.hpp"
#include "cmpg/generators.hpp"
#include "cmpg/mdp_response.hpp"
#include "test_util.hpp"

using namespace cmpg;
using cmpg::testing::frac;

namespace {

Game two_cycle() {
  GameBuilder b;
  b.add_state("x", {"a"}, {"b"}).add_state("y", {"a"}, {"b"});
  b.set("x", "a", "b", 0, {{"y", 1}});
  b.set("y", "a", "b", 1, {{"x", 1}});
  return b.build();
}

StationaryStrategy sqrt3_optimal(const Game& g) {
  StationaryStrategy s = StationaryStrategy::uniform(g, 1);
  s.exact.reset();
  const double p = 4.0 - 2.0 * std::sqrt(3.0);
  s.probabilities[g.state_index("u")] = {p, 1.0 - p};
  return s;
}

}  // namespace

TEST(SolveGainBias, SelfLoop) {
  GameBuilder b;
  b.add_state("s", {"a"}, {"b"});
  b.set("s", "a", "b", frac(7, 3), {{"s", 1}});
  const Game g = b.build();
  const GainBias gb =
      solve_gain_bias(g, StationaryStrategy::uniform(g, 1), StationaryStrategy::uniform(g, 2), 0);
  EXPECT_NEAR(gb.gain, 7.0 / 3.0, 1e-14);
  EXPECT_EQ(gb.potentials, std::vector<double>{0.0});
}

TEST(SolveGainBias, TwoCycle) {
  const Game g = two_cycle();
  const GainBias gb =
      solve_gain_bias(g, StationaryStrategy::uniform(g, 1), StationaryStrategy::uniform(g, 2), 0);
  // g + v_x = 0 + v_y, g + v_y = 1 + v_x, v_x = 0
  EXPECT_NEAR(gb.gain, 0.5, 1e-14);
  EXPECT_NEAR(gb.potentials[0], 0.0, 1e-14);
  EXPECT_NEAR(gb.potentials[1], 0.5, 1e-14);
}

TEST(SolveGainBias, SqrtThreeClosedForm) {
  const Game g = gen_sqrt_game(3);
  const StationaryStrategy s2 = StationaryStrategy::positional(g, 2, {0, 0});
  const GainBias gb = solve_gain_bias(g, sqrt3_optimal(g), s2, g.state_index("w"));
  EXPECT_NEAR(gb.gain, std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(gb.potentials[g.state_index("u")], std::sqrt(3.0) - 2.0, 1e-12);
  EXPECT_EQ(gb.potentials[g.state_index("w")], 0.0);
}

TEST(SolveGainBias, MultichainIsSingular) {
  GameBuilder b;
  b.add_state("x", {"a"}, {"b"}).add_state("y", {"a"}, {"b"});
  b.set("x", "a", "b", 0, {{"x", 1}});
  b.set("y", "a", "b", 1, {{"y", 1}});
  const Game g = b.build();
  EXPECT_THROW(solve_gain_bias(g, StationaryStrategy::uniform(g, 1), StationaryStrategy::uniform(g, 2), 0),
               SolverError);
}

TEST(BestResponse, SingleColumnIsPolicyEvaluation) {
  const Game g = two_cycle();
  const PotentialSolution p = best_response_potentials(g, StationaryStrategy::uniform(g, 1), 0);
  EXPECT_NEAR(p.gain, 0.5, 1e-14);
  EXPECT_NEAR(p.potentials[1], 0.5, 1e-14);
  EXPECT_EQ(p.iterations, 1u);
}

TEST(BestResponse, PureRowAgainstBothColumns) {
  const Game g = gen_sqrt_game(3);
  const StationaryStrategy s1 = StationaryStrategy::positional(g, 1, {0, 0});
  const PotentialSolution p = best_response_potentials(g, s1, 0);
  const double col1 = cmpg::testing::profile_gain(g, s1, StationaryStrategy::positional(g, 2, {0, 0}));
  const double col2 = cmpg::testing::profile_gain(g, s1, StationaryStrategy::positional(g, 2, {1, 0}));
  EXPECT_NEAR(p.gain, std::min(col1, col2), 1e-9);
  EXPECT_EQ(p.policy[0], col1 <= col2 ? 0u : 1u);
}

TEST(BestResponse, SqrtThreeOptimal) {
  const Game g = gen_sqrt_game(3);
  const PotentialSolution p = best_response_potentials(g, sqrt3_optimal(g), 1);
  EXPECT_NEAR(p.gain, std::sqrt(3.0), 1e-6);
  EXPECT_LE(min_equation_residual(g, sqrt3_optimal(g), p), 1e-8);
}

// --- properties -------------------------------------------------------------

TEST(MdpProperties, MatchesPositionalEnumeration) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 120; ++i) {
    cmpg::testing::RandomGameOptions o;
    o.n = 1 + i % 3;
    o.max_actions = 2;
    const Game g = cmpg::testing::random_game(rng, o);
    StationaryStrategy s1 = StationaryStrategy::uniform(g, 1);
    s1.exact.reset();
    for (StateIndex s = 0; s < g.num_states(); ++s) {
      if (g.num_actions1(s) == 2) {
        const double p = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        s1.probabilities[s] = {p, 1.0 - p};
      }
    }
    const PotentialSolution sol = best_response_potentials(g, s1, 0);
    EXPECT_NEAR(sol.gain, cmpg::testing::brute_best_response_gain(g, s1), 1e-9) << "game " << i;
    EXPECT_LE(min_equation_residual(g, s1, sol), 1e-8);
    EXPECT_EQ(sol.potentials[0], 0.0);
  }
}

TEST(MdpProperties, GainsNonincreasingAndAnchorFree) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 80; ++i) {
    cmpg::testing::RandomGameOptions o;
    o.n = 2 + i % 5;
    o.max_actions = 3;
    const Game g = cmpg::testing::random_game(rng, o);
    const StationaryStrategy s1 = StationaryStrategy::uniform(g, 1);
    const PotentialSolution a = best_response_potentials(g, s1, 0);
    for (std::size_t k = 1; k < a.gain_history.size(); ++k) {
      EXPECT_LE(a.gain_history[k], a.gain_history[k - 1] + 1e-12);
    }
    const StateIndex t = g.num_states() - 1;
    const PotentialSolution b = best_response_potentials(g, s1, t);
    EXPECT_NEAR(a.gain, b.gain, 1e-8);
    EXPECT_EQ(b.potentials[t], 0.0);
    // potentials differ by a constant shift
    const double shift = b.potentials[0] - a.potentials[0];
    for (StateIndex s = 0; s < g.num_states(); ++s) EXPECT_NEAR(b.potentials[s] - a.potentials[s], shift, 1e-8);
  }
}
