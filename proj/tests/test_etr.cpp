#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cmpg/error.hpp"
#include "cmpg/etr.hpp"
#include "cmpg/generators.hpp"
#include "test_util.hpp"

using namespace cmpg;
using cmpg::testing::frac;

namespace {

Game constant_game(const Rational& c, const Rational& w) {
  GameBuilder b;
  b.add_state("s", {"a"}, {"b"});
  b.set("s", "a", "b", c, {{"s", 1}});
  b.reward_scale(w);
  return b.build();
}

// Closed-form optimum of G_3 normalised by W = 2, anchored at w.
Assignment sqrt3_assignment(double gain_shift = 0.0) {
  const double r3 = std::sqrt(3.0), p = 4.0 - 2.0 * r3;
  return {{"g[0]", r3 / 2.0 + gain_shift},
          {"x[u,a1]", p},
          {"x[u,a2]", 1.0 - p},
          {"y[u,b1]", p},
          {"y[u,b2]", 1.0 - p},
          {"x[w,a]", 1.0},
          {"y[w,b]", 1.0},
          {"v[u]", r3 / 2.0 - 1.0},
          {"v[w]", 0.0}};
}

EtrSentence sqrt3_sentence() {
  const Game g = gen_sqrt_game(3);
  return emit_etr_component(g, {0, 1}, g.state_index("w"));
}

// Assignment for gen_sqrt_sum({2, 3}) entering at u: both copies anchored at u.
Assignment sqrt_sum_assignment(const Game& g) {
  const double w = g.reward_scale_double();
  Assignment a;
  double z = 0.0;
  for (int copy = 0; copy < 2; ++copy) {
    const std::int64_t b = copy == 0 ? 2 : 3;
    const std::string pre = "g" + std::to_string(copy) + ".";
    const double root = std::sqrt(static_cast<double>(b)), k = sqrt_parameters(b).k.to_double();
    const double p = cmpg::testing::sqrt_game_p(b);
    a[gain_variable(copy)] = root / w;
    a[x_variable(pre + "u", "a1")] = p;
    a[x_variable(pre + "u", "a2")] = 1.0 - p;
    a[y_variable(pre + "u", "b1")] = p;
    a[y_variable(pre + "u", "b2")] = 1.0 - p;
    a[x_variable(pre + "w", "a")] = 1.0;
    a[y_variable(pre + "w", "b")] = 1.0;
    a[v_variable(pre + "u")] = 0.0;
    a[v_variable(pre + "w")] = (k - root) / w;
    a[z_variable(pre + "u")] = a[z_variable(pre + "w")] = root / w;
    z += root / w / 2.0;
  }
  a[x_variable("s*", "a")] = 1.0;
  a[y_variable("s*", "b")] = 1.0;
  a[z_variable("s*")] = z;
  return a;
}

}  // namespace

TEST(Polynomial, Arithmetic) {
  const Polynomial x = Polynomial::variable(0), y = Polynomial::variable(1);
  const Polynomial p = (x + y) * (x - y);
  EXPECT_EQ(p, x * x - y * y);
  EXPECT_DOUBLE_EQ(p.evaluate({3.0, 2.0}), 5.0);
  EXPECT_TRUE((x - x).is_zero());
  EXPECT_DOUBLE_EQ((frac(1, 2) * x + Polynomial::constant(3)).evaluate({4.0}), 5.0);
}

TEST(EmitComponent, SelfLoopPinsGain) {
  const Game g = constant_game(frac(3, 4), 1);
  const EtrSentence s = emit_etr_component(g, {0}, 0);
  EXPECT_TRUE(check_assignment(s, {{"g[0]", 0.75}, {"x[s,a]", 1}, {"y[s,b]", 1}, {"v[s]", 0}}, 1e-12).ok);
  EXPECT_FALSE(check_assignment(s, {{"g[0]", 0.76}, {"x[s,a]", 1}, {"y[s,b]", 1}, {"v[s]", 0}}, 1e-12).ok);
  EXPECT_FALSE(check_assignment(s, {{"g[0]", 0.74}, {"x[s,a]", 1}, {"y[s,b]", 1}, {"v[s]", 0}}, 1e-12).ok);
}

TEST(EmitComponent, SqrtThreeClosedForm) {
  const EtrSentence s = sqrt3_sentence();
  EXPECT_TRUE(check_assignment(s, sqrt3_assignment(), 1e-9).ok);
  const AssignmentCheck bad = check_assignment(s, sqrt3_assignment(1e-3), 1e-9);
  EXPECT_FALSE(bad.ok);
  EXPECT_TRUE(bad.violated.rfind("le[", 0) == 0 || bad.violated.rfind("ge[", 0) == 0) << bad.violated;
  EXPECT_GT(bad.excess, 1e-4);
}

TEST(EmitComponent, ConstraintCount) {
  // n states, m actions for each player everywhere
  std::mt19937_64 rng(71);
  for (std::size_t n : {1u, 2u, 4u}) {
    for (std::size_t m : {1u, 2u, 3u}) {
      GameBuilder b;
      std::vector<std::string> acts1, acts2;
      for (std::size_t i = 0; i < m; ++i) {
        acts1.push_back("i" + std::to_string(i));
        acts2.push_back("j" + std::to_string(i));
      }
      for (std::size_t s = 0; s < n; ++s) b.add_state("s" + std::to_string(s), acts1, acts2);
      for (std::size_t s = 0; s < n; ++s) {
        for (const auto& x : acts1) {
          for (const auto& y : acts2) {
            std::vector<std::pair<std::string, Rational>> succ;
            for (std::size_t t = 0; t < n; ++t) succ.emplace_back("s" + std::to_string(t), frac(1, static_cast<long>(n)));
            b.set("s" + std::to_string(s), x, y, frac(static_cast<long>(rng() % 3), 2), succ);
          }
        }
      }
      b.reward_scale(1);
      const Game g = b.build();
      StateSet all;
      for (std::size_t s = 0; s < n; ++s) all.push_back(s);
      const EtrSentence e = emit_etr_component(g, all, 0);
      EXPECT_EQ(e.constraints.size(), n * m + n * m + 2 * n + 2 * n * m + 1) << n << "x" << m;
      EXPECT_EQ(e.variables.size(), 1 + 2 * n * m + n);
    }
  }
}

TEST(EmitComponent, RejectsNonComponent) {
  const Game g = gen_sqrt_sum({2, 3});
  EXPECT_THROW(emit_etr_component(g, {g.state_index("s*")}, g.state_index("s*")), PreconditionError);
}

TEST(EmitFull, ErgodicGameAddsLambda) {
  const Game g = gen_sqrt_game(3);
  const EtrSentence full = emit_etr_full(g, Rational::parse("1.74"), 0);
  EXPECT_EQ(full.constraints.size(), sqrt3_sentence().constraints.size() + 1);
  ASSERT_TRUE(full.lambda);
  EXPECT_EQ(*full.lambda, frac(87, 100));
  EXPECT_EQ(full.constraints.back().label, "lambda");
  // the anchor differs (first state), so rebuild potentials for anchor u
  Assignment a = sqrt3_assignment();
  a["v[w]"] = -a["v[u]"];
  a["v[u]"] = 0.0;
  EXPECT_TRUE(check_assignment(full, a, 1e-9).ok);
  EXPECT_FALSE(check_assignment(emit_etr_full(g, Rational::parse("1.72"), 0), a, 1e-9).ok);
}

TEST(EmitFull, SqrtSumAroundTheValue) {
  const Game g = gen_sqrt_sum({2, 3});
  const double v = (std::sqrt(2.0) + std::sqrt(3.0)) / 2.0;
  const StateIndex start = g.state_index("s*");
  const Assignment a = sqrt_sum_assignment(g);
  const EtrSentence above = emit_etr_full(g, Rational::from_double(v + 0.01), start);
  EXPECT_TRUE(check_assignment(above, a, 1e-9).ok) << check_assignment(above, a, 1e-9).violated;
  const EtrSentence below = emit_etr_full(g, Rational::from_double(v - 0.01), start);
  const AssignmentCheck c = check_assignment(below, a, 1e-9);
  EXPECT_FALSE(c.ok);
  EXPECT_EQ(c.violated, "lambda");
  // lowering z[s*] to fit under lambda breaks the reachability block instead
  Assignment cheat = a;
  cheat[z_variable("s*")] = (v - 0.01) / g.reward_scale_double();
  const AssignmentCheck d = check_assignment(below, cheat, 1e-9);
  EXPECT_FALSE(d.ok);
  EXPECT_EQ(d.violated.rfind("zge[", 0), 0u) << d.violated;
}

TEST(EmitFull, RejectsVerdictNone) {
  GameBuilder b;
  b.add_state("s", {"stay", "go"}, {"b"}).add_state("x", {"a"}, {"b"}).add_state("y", {"a"}, {"b"});
  b.set("s", "stay", "b", 0, {{"s", 1}});
  b.set("s", "go", "b", 0, {{"x", frac(1, 2)}, {"y", frac(1, 2)}});
  b.set("x", "a", "b", 0, {{"x", 1}});
  b.set("y", "a", "b", 1, {{"y", 1}});
  EXPECT_THROW(emit_etr_full(b.build(), 1, 0), PreconditionError);
}

TEST(CheckAssignment, MissingVariable) {
  Assignment a = sqrt3_assignment();
  a.erase("v[w]");
  EXPECT_THROW(check_assignment(sqrt3_sentence(), a, 1e-9), PreconditionError);
}

TEST(SmtLib, FormatAndRoundTrip) {
  const EtrSentence s = emit_etr_full(gen_sqrt_sum({2, 3}), frac(3, 2), 0);
  const std::string text = to_smtlib(s);
  EXPECT_NE(text.find("(set-logic QF_NRA)"), std::string::npos);
  EXPECT_NE(text.find("(declare-fun |g[0]| () Real)"), std::string::npos);
  EXPECT_NE(text.find("(/ 1 2)"), std::string::npos);
  EXPECT_EQ(text.substr(text.size() - 12), "(check-sat)\n");
  const EtrSentence back = parse_smtlib(text);
  EXPECT_EQ(back, s);
  EXPECT_EQ(to_smtlib(back), text);
}

TEST(SmtLib, NegativeCoefficients) {
  EtrSentence s;
  s.variables = {"p", "q"};
  Polynomial lhs = frac(-3, 7) * Polynomial::variable(0) * Polynomial::variable(1);
  lhs += Polynomial::constant(-2);
  s.constraints.push_back({lhs, Relation::Ge, Polynomial::variable(1), "neg"});
  const EtrSentence back = parse_smtlib(to_smtlib(s));
  EXPECT_EQ(back, s);
  EXPECT_DOUBLE_EQ(back.constraints[0].lhs.evaluate({7.0, 1.0}), -5.0);
}

TEST(SmtLib, ParseErrors) {
  EXPECT_THROW(parse_smtlib("(assert (<= |x| 1))"), ParseError);
  EXPECT_THROW(parse_smtlib("(set-logic QF_NRA)\n(declare-fun |x| () Real)\n(assert (! (<= |x| 1) :named |a|)"),
               ParseError);
}

TEST(Assignment, ParseFormats) {
  const Assignment a = parse_assignment(R"({"x": 0.5, "y": "1/3", "z": "-0.25"})");
  EXPECT_DOUBLE_EQ(a.at("x"), 0.5);
  EXPECT_DOUBLE_EQ(a.at("y"), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(a.at("z"), -0.25);
  EXPECT_EQ(parse_assignment(serialize_assignment(a)), a);
  EXPECT_THROW(parse_assignment("[1, 2]"), ParseError);
  EXPECT_THROW(parse_assignment(R"({"x": true})"), ParseError);
}

// --- properties -------------------------------------------------------------

TEST(EtrProperties, EmissionIsDeterministic) {
  for (int run = 0; run < 2; ++run) {
    const Game a = gen_lower_bound(2, frac(1, 16)).game;
    const Game b = gen_lower_bound(2, frac(1, 16)).game;
    EXPECT_EQ(to_smtlib(emit_etr_full(a, frac(1, 2), 0)), to_smtlib(emit_etr_full(b, frac(1, 2), 0)));
  }
}

TEST(EtrProperties, RoundTripOnRandomGames) {
  std::mt19937_64 rng(72);
  for (int i = 0; i < 40; ++i) {
    cmpg::testing::RandomGameOptions o;
    o.n = 1 + i % 4;
    o.full_support = i % 2 == 0;
    const Game g = cmpg::testing::random_game(rng, o);
    if (classify(g).verdict == Verdict::None) continue;
    const EtrSentence s = emit_etr_full(g, frac(1, 3), 0);
    EXPECT_EQ(parse_smtlib(to_smtlib(s)), s);
  }
}

TEST(EtrProperties, HoffmanKarpAssignmentsSatisfyKnownGames) {
  std::vector<std::pair<Game, double>> games;
  for (std::int64_t b : {2, 3, 5, 7}) games.emplace_back(gen_sqrt_game(b), std::sqrt(static_cast<double>(b)));
  games.emplace_back(gen_lower_bound(2, frac(1, 16)).game, 0.5);
  games.emplace_back(gen_lower_bound(3, frac(1, 20)).game, 0.5);
  for (const auto& [g, value] : games) {
    StateSet all;
    for (StateIndex s = 0; s < g.num_states(); ++s) all.push_back(s);
    const EtrSentence s = emit_etr_component(g, all, 0);
    EXPECT_TRUE(check_assignment(s, cmpg::testing::ergodic_assignment(g, 0, value), 1e-6).ok);
    EXPECT_FALSE(check_assignment(s, cmpg::testing::ergodic_assignment(g, 0, value + 1e-3 * g.reward_scale_double()), 1e-6).ok);
  }
}
