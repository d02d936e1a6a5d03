// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "cmpg/classify.hpp"
#include "cmpg/error.hpp"
#include "cmpg/etr.hpp"
#include "cmpg/game_io.hpp"
#include "cmpg/generators.hpp"
#include "cmpg/run_record.hpp"
#include "cmpg/solvers.hpp"
#include "test_util.hpp"

using namespace cmpg;
using cmpg::testing::frac;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail << "; ";
      else detail.str("");
      detail << what;
      pass = false;
    }
  }
};

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Round-trips through the file format, the way `gen ... | solve ...` does.
Game via_file(const Game& g) { return parse_game(serialize_game(g)); }

void ac1(Outcome& o) {
  for (std::int64_t b : {2, 3, 5, 7}) {
    const Stopwatch clock;
    const Game g = via_file(gen_sqrt_game(b));
    const Rational eps = Rational::parse("0.005");
    ValueIterationOptions vo;
    vo.steps = vi_steps_for_epsilon(compute_stats(g), g.reward_scale(), eps);
    const ValueIterationResult r = value_iteration(g, vo);
    const double root = std::sqrt(static_cast<double>(b)), secs = clock.seconds();
    o.detail << "b=" << b << " T=" << r.steps << " width=" << num(r.bracket.width()) << " |mid-root|="
             << num(std::abs(r.bracket.midpoint() - root)) << " " << num(secs) << "s  ";
    const std::string tag = "b=" + std::to_string(b);
    o.require(r.bracket.width() <= 0.005, tag + " bracket too wide");
    o.require(r.bracket.contains(root), tag + " bracket misses sqrt(b)");
    o.require(std::abs(r.bracket.midpoint() - root) <= 0.005, tag + " midpoint off");
    o.require(secs <= 60.0, tag + " slower than 60 s");
  }
}

void ac2(Outcome& o) {
  const Game g = gen_sqrt_game(3);
  StrategyIterationOptions so;
  so.q = 10000;
  const StrategyIterationResult r = var_hoffman_karp(g, frac(1, 100), g.state_index("w"), so);
  const double p = r.strategy.probabilities[g.state_index("u")][0];
  o.detail << "p(a1 at u)=" << num(p) << " (target " << num(4 - 2 * std::sqrt(3.0)) << ") gain=" << num(r.gain)
           << " iterations=" << r.iterations;
  o.require(std::abs(p - (4 - 2 * std::sqrt(3.0))) <= 0.01, "probability off by more than 0.01");
  o.require(std::abs(r.gain - std::sqrt(3.0)) <= 0.01, "gain off by more than 0.01");
}

void ac3(Outcome& o) {
  for (auto [k, eta] : {std::pair{2, frac(1, 16)}, std::pair{2, frac(1, 32)}, std::pair{3, frac(1, 20)}}) {
    const Stopwatch clock;
    const LowerBoundGame lb = gen_lower_bound(k, eta);
    const Game g = via_file(lb.game);
    const std::string tag = "k=" + std::to_string(k) + " eta=" + eta.str();
    o.require(check_skew_symmetric(g, lb.witness).ok, tag + " not skew-symmetric");
    o.require(classify(g).verdict == Verdict::Ergodic, tag + " not ergodic");
    ValueIterationOptions vo;
    vo.steps = std::min<std::int64_t>(vi_steps_for_epsilon(compute_stats(g), g.reward_scale(), frac(1, 50)), 100000);
    const ValueIterationResult r = value_iteration(g, vo);
    const double secs = clock.seconds();
    o.detail << tag << " T=" << r.steps << " tight=[" << num(r.tight.lo) << "," << num(r.tight.hi) << "] minmax width="
             << num(r.bracket.width()) << " " << num(secs) << "s  ";
    o.require(r.bracket.contains(0.5) && r.tight.contains(0.5), tag + " bracket misses 1/2");
    o.require(r.tight.width() <= 0.02, tag + " bracket wider than 0.02");
    o.require(secs <= 120.0, tag + " slower than 120 s");
  }
}

void ac4(Outcome& o) {
  const Rational eta = frac(1, 16);
  const Game g = gen_lower_bound(2, eta).game;
  const StationaryStrategy star = lower_bound_sigma_star(g, 2, eta);
  const PotentialSolution br = best_response_potentials(g, star, 0);
  const double low = evaluate_profile(g, star, StationaryStrategy::positional(g, 2, br.policy), 0) /
                     g.reward_scale_double();
  StrategyIterationOptions so;
  so.q = 64;
  const StrategyIterationResult si = var_hoffman_karp(g, frac(1, 50), 0, so);
  const double high = si.gain / g.reward_scale_double();
  o.detail << "sigma* (patience " << num(patience(star)) << ") vs best response: " << num(low)
           << " (bound " << num(23.0 / 48 + 0.01) << "); SI q=64: " << num(high) << " (patience "
           << num(patience(si.strategy)) << ")";
  o.require(low <= 23.0 / 48.0 + 0.01, "sigma* does better than 23/48 + 0.01");
  o.require(high >= 0.5 - 0.02, "SI with q=64 below 1/2 - 0.02");
}

void ac5(Outcome& o) {
  struct Case {
    const char* name;
    Game ssg;
    Rational value;
    bool default_exponents;
  };
  const std::vector<Case> cases{{"coin", testing::ssg_coin(), frac(1, 2), true},
                                {"quarter", testing::ssg_quarter(), frac(1, 4), true},
                                {"one", testing::ssg_one(), Rational(1), false}};
  for (const Case& c : cases) {
    const SsgShape shape = validate_ssg(c.ssg);
    const int n = static_cast<int>(shape.nonterminal.size());
    const int alpha = c.default_exponents ? 9 * n : 9, beta = c.default_exponents ? 7 * n : 7;
    const StateIndex s = c.ssg.state_index("s");
    const Game red = reduce_ssg(c.ssg, s, alpha, beta);
    const auto [lo, hi] = reduction_interval(static_cast<std::size_t>(n), c.value, alpha, beta);
    ValueIterationOptions vo;
    vo.steps = 50'000'000;
    vo.stop_width = (hi - lo).to_double() / 100.0;
    vo.threads = 1;
    const ValueIterationResult r = value_iteration(red, vo);
    o.detail << c.name << " n=" << n << " (" << alpha << "," << beta << ") value in [" << num(r.tight.lo) << ","
             << num(r.tight.hi) << "] interval [" << num(lo.to_double()) << "," << num(hi.to_double()) << "] T="
             << r.steps << "  ";
    o.require(classify(red).verdict == Verdict::Ergodic, std::string(c.name) + " reduction not ergodic");
    o.require(r.tight.lo >= lo.to_double() && r.tight.hi <= hi.to_double(),
              std::string(c.name) + " value outside the interval");
  }
}

std::vector<std::pair<std::string, std::pair<Game, double>>> known_ergodic_games() {
  std::vector<std::pair<std::string, std::pair<Game, double>>> out;
  for (std::int64_t b = 1; b <= 12; ++b) {
    out.push_back({"sqrt" + std::to_string(b), {gen_sqrt_game(b), std::sqrt(static_cast<double>(b))}});
  }
  out.push_back({"lb(2,1/16)", {gen_lower_bound(2, frac(1, 16)).game, 0.5}});
  out.push_back({"lb(2,1/32)", {gen_lower_bound(2, frac(1, 32)).game, 0.5}});
  out.push_back({"lb(3,1/20)", {gen_lower_bound(3, frac(1, 20)).game, 0.5}});
  out.push_back({"lb(4,1/21)", {gen_lower_bound(4, frac(1, 21)).game, 0.5}});
  return out;
}

void ac6(Outcome& o) {
  std::size_t checks = 0;
  for (const auto& [name, gv] : known_ergodic_games()) {
    for (std::int64_t t : {1, 10, 100, 1000}) {
      const ValueIterationResult r = value_iteration(gv.first, t);
      ++checks;
      o.require(r.bracket.lo - 1e-7 <= gv.second && gv.second <= r.bracket.hi + 1e-7,
                name + " T=" + std::to_string(t) + " misses the value");
    }
  }
  if (o.pass) o.detail << checks << " (game, T) pairs bracketed";
}

void ac7(Outcome& o) {
  std::mt19937_64 rng(7001);
  std::size_t roundings = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t len = 1 + rng() % 6;
    const long den = static_cast<long>(len) + static_cast<long>(rng() % 200);
    const auto d = testing::random_distribution(rng, len, den, false);
    for (std::int64_t q = static_cast<std::int64_t>(len); q <= 4 * static_cast<std::int64_t>(len); ++q) {
      const QRoundedDistribution out = round_distribution(d, q);
      ++roundings;
      Rational total;
      bool close = true;
      for (std::size_t k = 0; k < len; ++k) {
        const Rational p = frac(static_cast<long>(out.counts[k]), static_cast<long>(q));
        total += p;
        close = close && out.counts[k] >= 0 && (d[k] - p).abs() < frac(1, static_cast<long>(q));
      }
      o.require(total == Rational(1), "output does not sum to 1");
      o.require(close, "some |d - out| >= 1/q");
    }
  }
  if (o.pass) o.detail << "1000 distributions, " << roundings << " roundings exact";
}

void ac8(Outcome& o) {
  std::mt19937_64 rng(8001);
  int mismatch_a = 0, mismatch_b = 0, mismatch_c = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t r = 1 + rng() % 3, c = 1 + rng() % 3;
    const auto m = testing::random_rational_matrix(rng, r, c, -9, 9, 1 + static_cast<long>(rng() % 4));
    const std::int64_t q = 1 + static_cast<std::int64_t>(rng() % 12);
    const BestQRounded got = best_q_rounded(MatrixGame::exact(m), q);
    const testing::BruteRounded want = testing::brute_q_rounded(m, q);
    if (*got.exact_value != want.value || got.x.counts != want.counts) ++mismatch_a;
  }
  for (int i = 0; i < 100; ++i) {
    testing::RandomGameOptions go;
    go.n = 1 + i % 3;
    go.max_actions = 2;
    const Game g = testing::random_game(rng, go);
    StationaryStrategy s1 = StationaryStrategy::uniform(g, 1);
    s1.exact.reset();
    for (StateIndex s = 0; s < g.num_states(); ++s) {
      if (g.num_actions1(s) == 2) {
        const double p = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        s1.probabilities[s] = {p, 1.0 - p};
      }
    }
    if (std::abs(best_response_potentials(g, s1, 0).gain - testing::brute_best_response_gain(g, s1)) > 1e-9) {
      ++mismatch_b;
    }
  }
  for (int i = 0; i < 100; ++i) {
    testing::RandomGameOptions go;
    go.n = 1 + i % 4;
    go.max_actions = 2;
    go.full_support = false;
    const Game g = testing::random_game(rng, go);
    const StateSet target{static_cast<StateIndex>(rng() % go.n)};
    if (guaranteed_reach(g, target) != testing::brute_guaranteed_reach(g, target)) ++mismatch_c;
  }
  o.detail << "mismatches: best_q_rounded " << mismatch_a << "/200, best response " << mismatch_b
           << "/100, guaranteed_reach " << mismatch_c << "/100";
  o.require(mismatch_a + mismatch_b + mismatch_c == 0, o.detail.str());
}

void ac9(Outcome& o) {
  std::vector<std::pair<std::string, Game>> games;
  for (std::int64_t b : {2, 3, 5, 7}) games.push_back({"sqrt" + std::to_string(b), gen_sqrt_game(b)});
  games.push_back({"lb(2,1/16)", gen_lower_bound(2, frac(1, 16)).game});
  games.push_back({"lb(3,1/20)", gen_lower_bound(3, frac(1, 20)).game});
  std::mt19937_64 rng(9001);
  for (int i = 0; i < 30; ++i) {
    testing::RandomGameOptions go;
    go.n = 1 + i % 5;
    go.max_actions = 2 + i % 2;
    games.push_back({"random" + std::to_string(i), testing::random_game(rng, go)});
  }
  std::size_t iterations = 0;
  for (const auto& [name, g] : games) {
    for (std::int64_t q : {16, 64, 250}) {
      StrategyIterationOptions so;
      so.q = q;
      const StrategyIterationResult r = var_hoffman_karp(g, Rational(1), 0, so);
      iterations += r.iterations;
      for (std::size_t k = 1; k < r.gains.size(); ++k) {
        o.require(r.gains[k] >= r.gains[k - 1] - 1e-9, name + " q=" + std::to_string(q) + " gain decreased");
      }
      for (StateIndex s = 0; s < g.num_states(); ++s) {
        const MatrixGame m = lookahead_matrix(g, s, r.potentials.potentials);
        const double have = guaranteed_value(m, r.strategy.at(s));
        const double best = best_q_rounded(m, q).value;
        o.require(std::abs(have - best) <= 1e-8, name + " q=" + std::to_string(q) + " not a fixed point at " +
                                                     g.state_name(s));
      }
    }
  }
  if (o.pass) o.detail << games.size() << " games x 3 values of q, " << iterations << " iterations, gains monotone";
}

void ac10(Outcome& o) {
  std::size_t games = 0;
  for (const auto& [name, gv] : known_ergodic_games()) {
    const Game& g = gv.first;
    StateSet all;
    for (StateIndex s = 0; s < g.num_states(); ++s) all.push_back(s);
    const EtrSentence sentence = parse_smtlib(to_smtlib(emit_etr_component(g, all, 0)));
    Assignment a = testing::ergodic_assignment(g, 0, gv.second);
    const AssignmentCheck good = check_assignment(sentence, a, 1e-6);
    o.require(good.ok, name + " assignment rejected at " + good.violated + " by " + num(good.excess));
    for (double shift : {1e-3, -1e-3}) {
      Assignment bad = a;
      bad[gain_variable(0)] += shift;
      o.require(!check_assignment(sentence, bad, 1e-6).ok, name + " perturbed assignment accepted");
    }
    ++games;
  }
  if (o.pass) o.detail << games << " games: assignments accepted at 1e-6, g +/- 1e-3 rejected";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"AC1 square-root values by value iteration", ac1},
      {"AC2 optimal strategy of the sqrt(3) game", ac2},
      {"AC3 skew-symmetric games have value 1/2", ac3},
      {"AC4 low-patience strategies lose", ac4},
      {"AC5 SSG reduction fidelity", ac5},
      {"AC6 finite-horizon bracketing", ac6},
      {"AC7 exact distribution rounding", ac7},
      {"AC8 oracle equivalences", ac8},
      {"AC9 strategy-iteration monotonicity and fixed point", ac9},
      {"AC10 ETR consistency", ac10},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " | " << o.detail.str() << std::endl;
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
