// cmpg: command-line front end for the concurrent mean-payoff game toolkit.

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "cmpg/classify.hpp"
#include "cmpg/error.hpp"
#include "cmpg/etr.hpp"
#include "cmpg/game_io.hpp"
#include "cmpg/generators.hpp"
#include "cmpg/run_record.hpp"
#include "cmpg/solvers.hpp"

namespace {

using namespace cmpg;

struct GlobalOptions {
  std::string output;  // run record path, empty for none
  unsigned threads = 0;
  std::uint64_t node_budget = kDefaultNodeBudget;
  double residual_tol = 1e-8;
  double lp_tol = 1e-9;
  std::size_t si_cap = 1'000'000;
};

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

std::string bracket_text(const Bracket& b) { return "[" + fmt(b.lo) + ", " + fmt(b.hi) + "]"; }

RecordJson bracket_json(const Bracket& b) {
  RecordJson j;
  j["lo"] = quantity(b.lo, false);
  j["hi"] = quantity(b.hi, false);
  j["width"] = b.width();
  return j;
}

StateIndex state_or_first(const Game& g, const std::string& name) {
  return name.empty() ? 0 : g.state_index(name);
}

std::string state_list(const Game& g, const StateSet& set) {
  std::string out = "{";
  for (std::size_t k = 0; k < set.size(); ++k) out += (k ? ", " : "") + g.state_name(set[k]);
  return out + "}";
}

RecordJson state_names(const Game& g, const StateSet& set) {
  RecordJson out = RecordJson::array();
  for (StateIndex s : set) out.push_back(g.state_name(s));
  return out;
}

RecordJson strategy_json(const Game& g, const StationaryStrategy& sigma) {
  return RecordJson::parse(serialize_strategy(g, sigma));
}

// --- subcommands ------------------------------------------------------------

void run_validate(const std::string& path, RunRecord& record) {
  const Game g = parse_game(read_text(path));
  record.set_game(g);
  const GameStats st = compute_stats(g);
  std::cout << "valid game\n"
            << "states: " << st.n << "\n"
            << "max actions: " << st.m << "\n"
            << "random states: " << st.r << "\n"
            << "delta_min: " << st.delta_min << "\n"
            << "reward_scale: " << g.reward_scale() << "\n";
  auto& r = record.results();
  r["n"] = st.n;
  r["m"] = st.m;
  r["r"] = st.r;
  r["delta_min"] = st.delta_min.str();
  r["reward_scale"] = g.reward_scale().str();
}

void run_classify(const std::string& path, RunRecord& record) {
  const Game g = parse_game(read_text(path));
  record.set_game(g);
  const Classification c = classify(g);
  std::cout << "verdict: " << to_string(c.verdict) << "\n";
  for (std::size_t k = 0; k < c.components.size(); ++k) {
    std::cout << "component " << k << ": " << state_list(g, c.components[k]) << "\n";
  }
  std::cout << "tests: ergodic=" << c.ergodic_test << " sure=" << c.sure_test << " almost_sure=" << c.almost_sure_test
            << "\n";
  if (!c.witness.cycle.empty()) std::cout << "cycle outside components: " << state_list(g, c.witness.cycle) << "\n";
  if (!c.witness.trap.empty()) std::cout << "trap outside components: " << state_list(g, c.witness.trap) << "\n";
  for (const StateSet& r : c.witness.rejected_bottom_sccs) {
    std::cout << "rejected bottom SCC: " << state_list(g, r) << "\n";
  }

  RecordJson j;
  j["verdict"] = to_string(c.verdict);
  j["components"] = RecordJson::array();
  for (const StateSet& comp : c.components) j["components"].push_back(state_names(g, comp));
  j["tests"] = {{"ergodic", c.ergodic_test}, {"sure_ergodic", c.sure_test}, {"almost_sure_ergodic", c.almost_sure_test}};
  j["witness"]["cycle"] = state_names(g, c.witness.cycle);
  j["witness"]["trap"] = state_names(g, c.witness.trap);
  j["witness"]["rejected_bottom_sccs"] = RecordJson::array();
  for (const StateSet& r : c.witness.rejected_bottom_sccs) j["witness"]["rejected_bottom_sccs"].push_back(state_names(g, r));
  std::cout << j.dump() << "\n";
  record.results() = j;
}

struct SolveOptions {
  std::string path;
  std::string method = "vi";
  std::string epsilon;
  std::int64_t steps = 0;
  std::int64_t max_steps = 0;
  double stop_width = 0.0;
  std::int64_t q = 0;
  std::string anchor;
  std::string strategy_out;
  bool trace = false;
};

void run_solve(const SolveOptions& o, const GlobalOptions& global, RunRecord& record) {
  const Game g = parse_game(read_text(o.path));
  record.set_game(g);
  if (o.epsilon.empty()) throw PreconditionError("--epsilon is required");
  const Rational eps = Rational::parse(o.epsilon);
  if (eps.sign() <= 0) throw PreconditionError("--epsilon must be positive");
  const GameStats st = compute_stats(g);
  auto& r = record.results();
  r["method"] = o.method;

  if (o.method == "vi") {
    const std::int64_t derived = vi_steps_for_epsilon(st, g.reward_scale(), eps);
    std::int64_t steps = o.steps > 0 ? o.steps : derived;
    if (o.max_steps > 0) steps = std::min(steps, o.max_steps);
    ValueIterationOptions vo;
    vo.steps = steps;
    vo.stop_width = o.stop_width;
    vo.trace = o.trace;
    vo.threads = global.threads;
    const ValueIterationResult res = value_iteration(g, vo);
    std::cout << "method: value iteration\n"
              << "steps: " << res.steps << " (step bound " << derived << ")\n"
              << "bracket: " << bracket_text(res.bracket) << " width " << fmt(res.bracket.width()) << "\n"
              << "tight bracket: " << bracket_text(res.tight) << " width " << fmt(res.tight.width()) << "\n"
              << "midpoint: " << fmt(res.tight.midpoint()) << "\n";
    for (StateIndex s = 0; s < g.num_states(); ++s) {
      std::cout << "  v[" << g.state_name(s) << "] = " << fmt(res.values[s]) << "\n";
    }
    r["steps"] = res.steps;
    r["bound_steps"] = derived;
    r["bracket"] = bracket_json(res.bracket);
    r["increment_bracket"] = bracket_json(res.increment);
    r["tight_bracket"] = bracket_json(res.tight);
    r["values"] = RecordJson::object();
    for (StateIndex s = 0; s < g.num_states(); ++s) r["values"][g.state_name(s)] = quantity(res.values[s], false);
    if (o.trace) {
      r["trace"] = RecordJson::array();
      for (const auto& t : res.trace) {
        r["trace"].push_back({{"step", t.step}, {"bracket", {t.bracket.lo, t.bracket.hi}}, {"tight", {t.tight.lo, t.tight.hi}}});
      }
    }
    return;
  }
  if (o.method != "si") throw PreconditionError("--method must be vi or si");

  StrategyIterationOptions so;
  if (o.q > 0) so.q = o.q;
  so.node_budget = global.node_budget;
  so.max_iterations = global.si_cap;
  so.lp_tol = global.lp_tol;
  so.trace = o.trace;
  so.threads = global.threads;
  const StateIndex t = state_or_first(g, o.anchor);
  const StrategyIterationResult res = var_hoffman_karp(g, eps, t, so);
  const double residual = min_equation_residual(g, res.strategy, res.potentials);
  if (residual > global.residual_tol) {
    throw SolverError("potential equations not satisfied: residual " + fmt(residual));
  }
  std::cout << "method: strategy iteration\n"
            << "q: " << res.q << "\n"
            << "iterations: " << res.iterations << "\n"
            << "gain: " << fmt(res.gain) << "\n"
            << "epsilon guarantee for this q: " << fmt(res.epsilon_guarantee) << "\n"
            << "anchor: " << g.state_name(t) << "\n";
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    std::cout << "  " << g.state_name(s) << ":";
    for (ActionIndex a = 0; a < g.num_actions1(s); ++a) {
      std::cout << " " << g.actions1(s)[a] << "=" << (*res.strategy.exact)[s][a];
    }
    std::cout << "  potential " << fmt(res.potentials.potentials[s]) << "\n";
  }
  if (!o.strategy_out.empty()) write_text(o.strategy_out, serialize_strategy(g, res.strategy));
  r["q"] = res.q;
  r["iterations"] = res.iterations;
  r["gain"] = quantity(res.gain, false);
  r["epsilon_guarantee"] = quantity(res.epsilon_guarantee, false);
  r["anchor"] = g.state_name(t);
  r["residual"] = residual;
  r["gains"] = res.gains;
  r["strategy"] = strategy_json(g, res.strategy);
  r["potentials"] = RecordJson::object();
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    r["potentials"][g.state_name(s)] = quantity(res.potentials.potentials[s], false);
  }
  if (o.trace) {
    r["trace"] = RecordJson::array();
    for (const auto& step : res.trace) {
      RecordJson changed = RecordJson::array();
      for (StateIndex s : step.changed) changed.push_back(g.state_name(s));
      r["trace"].push_back({{"iteration", step.iteration}, {"gain", step.gain}, {"changed", changed}});
    }
  }
}

void run_eval(const std::string& path, const std::string& s1, const std::string& s2, const std::string& state,
              RunRecord& record) {
  const Game g = parse_game(read_text(path));
  record.set_game(g);
  const StationaryStrategy sigma1 = parse_strategy(g, read_text(s1));
  const StationaryStrategy sigma2 = parse_strategy(g, read_text(s2));
  if (sigma1.player != 1 || sigma2.player != 2) throw ValidationError("--s1 must be a Player-1 and --s2 a Player-2 strategy");
  const StateIndex s = state_or_first(g, state);
  const double gain = evaluate_profile(g, sigma1, sigma2, s);
  std::cout << "gain from " << g.state_name(s) << ": " << fmt(gain) << "\n"
            << "normalized: " << fmt(gain / g.reward_scale_double()) << "\n";
  record.results()["state"] = g.state_name(s);
  record.results()["gain"] = quantity(gain, false);
  record.results()["normalized_gain"] = quantity(gain / g.reward_scale_double(), true);
}

std::vector<std::int64_t> parse_numbers(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ParseError("not an integer list: '" + text + "'");
    }
  }
  return out;
}

void emit_game(const Game& g, const std::string& to, RunRecord& record) {
  write_text(to, serialize_game(g));
  record.set_game(g);
  record.results()["states"] = g.num_states();
}

void run_reduce(const std::string& path, const std::string& state, int alpha, int beta, const std::string& to,
                RunRecord& record) {
  const Game ssg = parse_game(read_text(path));
  const SsgShape shape = validate_ssg(ssg);
  const long n = static_cast<long>(shape.nonterminal.size());
  if (alpha <= 0) alpha = static_cast<int>(9 * n);
  if (beta <= 0) beta = static_cast<int>(7 * n);
  const Game out = reduce_ssg(ssg, ssg.state_index(state), alpha, beta);
  emit_game(out, to, record);
  record.results()["alpha"] = alpha;
  record.results()["beta"] = beta;
  record.results()["nonterminal_states"] = n;
  if (alpha == 9 * n && beta == 7 * n) {
    const Rational r = Rational(2).pow(-7 * n + 1);
    record.results()["interval_radius"] = r.str();
    std::cerr << "value lies within " << r << " of the SSG value at " << state << "\n";
  }
}

void run_export(const std::string& path, const std::string& lambda, const std::string& state,
                const std::string& anchor, const std::string& to, RunRecord& record) {
  const Game g = parse_game(read_text(path));
  record.set_game(g);
  EtrSentence sentence;
  if (lambda.empty()) {
    const std::vector<StateSet> comps = ergodic_components(g);
    if (comps.size() != 1 || comps.front().size() != g.num_states()) {
      throw PreconditionError("game is not ergodic; pass --lambda for the almost-sure ergodic sentence");
    }
    sentence = emit_etr_component(g, comps.front(), state_or_first(g, anchor));
  } else {
    sentence = emit_etr_full(g, Rational::parse(lambda), state_or_first(g, state));
  }
  write_text(to, to_smtlib(sentence));
  record.results()["variables"] = sentence.variables.size();
  record.results()["constraints"] = sentence.constraints.size();
  if (sentence.lambda) record.results()["lambda"] = sentence.lambda->str();
}

void run_check(const std::string& sentence_path, const std::string& assignment_path, double tol, RunRecord& record) {
  const EtrSentence sentence = parse_smtlib(read_text(sentence_path));
  const Assignment assignment = parse_assignment(read_text(assignment_path));
  const AssignmentCheck c = check_assignment(sentence, assignment, tol);
  if (c.ok) {
    std::cout << "satisfied (" << sentence.constraints.size() << " constraints, tol " << fmt(tol) << ")\n";
  } else {
    std::cout << "violated: " << c.violated << " by " << fmt(c.excess) << "\n";
  }
  record.results()["satisfied"] = c.ok;
  if (!c.ok) {
    record.results()["violated"] = c.violated;
    record.results()["excess"] = c.excess;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solver toolkit for ergodic concurrent mean-payoff games", "cmpg"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  global.threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--output", global.output, "Write a JSON run record to this file ('-' for stdout)");
  app.add_option("--threads", global.threads, "Worker threads")->envname("CMPG_THREADS")->check(CLI::PositiveNumber);
  app.add_option("--node-budget", global.node_budget, "Branch-and-bound node budget")->envname("CMPG_NODE_BUDGET");
  app.add_option("--residual-tol", global.residual_tol, "Accepted residual of the potential equations");
  app.add_option("--lp-tol", global.lp_tol, "Relative matrix-game tolerance");
  app.add_option("--si-cap", global.si_cap, "Strategy-iteration cap");

  std::string game_path, state, anchor, to = "-";

  auto* validate = app.add_subcommand("validate", "Parse and validate a game, print its statistics");
  validate->add_option("game", game_path, "Game file ('-' for stdin)")->required();

  auto* classify_cmd = app.add_subcommand("classify", "Ergodic decomposition and class verdict");
  classify_cmd->add_option("game", game_path, "Game file")->required();

  SolveOptions so;
  auto* solve = app.add_subcommand("solve", "Approximate the value by value or strategy iteration");
  solve->add_option("game", so.path, "Game file")->required();
  solve->add_option("--method", so.method, "vi or si")->check(CLI::IsMember({"vi", "si"}));
  solve->add_option("--epsilon", so.epsilon, "Target accuracy in reward units")->required();
  solve->add_option("--steps", so.steps, "VI: number of steps (default: step bound for epsilon)");
  solve->add_option("--max-steps", so.max_steps, "VI: cap on the number of steps");
  solve->add_option("--stop-width", so.stop_width, "VI: stop once the tight bracket is this narrow");
  solve->add_option("--q", so.q, "SI: rounding denominator (default: from epsilon)");
  solve->add_option("--anchor", so.anchor, "SI: potential anchor state (default: first state)");
  solve->add_option("--strategy-out", so.strategy_out, "SI: write the strategy file here");
  solve->add_flag("--trace", so.trace, "Record per-iteration traces in the run record");

  std::string s1_path, s2_path;
  auto* eval = app.add_subcommand("eval", "Mean payoff of a stationary profile");
  eval->add_option("game", game_path, "Game file")->required();
  eval->add_option("--s1", s1_path, "Player-1 strategy file")->required();
  eval->add_option("--s2", s2_path, "Player-2 strategy file")->required();
  eval->add_option("--state", state, "Start state (default: first state)");

  auto* gen = app.add_subcommand("gen", "Generate a game family");
  gen->require_subcommand(1);
  std::int64_t sqrt_b = 0;
  auto* gen_sqrt = gen->add_subcommand("sqrt", "Ergodic game of value sqrt(B)");
  gen_sqrt->add_option("B", sqrt_b, "Positive integer")->required();
  gen_sqrt->add_option("--to", to, "Game output ('-' for stdout)");
  std::string nums_text, entry = "u";
  auto* gen_sum = gen->add_subcommand("sqrtsum", "Sure-ergodic game of value (sum sqrt N_i)/l at s*");
  gen_sum->add_option("NUMS", nums_text, "Comma-separated positive integers")->required();
  gen_sum->add_option("--entry", entry, "Entry state of each copy")->check(CLI::IsMember({"u", "w"}));
  gen_sum->add_option("--to", to, "Game output");
  int lb_k = 2;
  std::string lb_eta, witness_path;
  auto* gen_lb = gen->add_subcommand("lower-bound", "Skew-symmetric game needing high patience");
  gen_lb->add_option("--k", lb_k, "Chain length k >= 2")->required();
  gen_lb->add_option("--eta", lb_eta, "Chain probability P/Q < 1/(4k+4)")->required();
  gen_lb->add_option("--witness", witness_path, "Write the skew-symmetry witness here");
  gen_lb->add_option("--to", to, "Game output");

  std::string ssg_path;
  int alpha = 0, beta = 0;
  auto* reduce = app.add_subcommand("reduce-ssg", "Reduce a simple stochastic game to an ergodic game");
  reduce->add_option("ssg", ssg_path, "SSG game file")->required();
  reduce->add_option("state", state, "State whose value is encoded")->required();
  reduce->add_option("--alpha", alpha, "Terminal leak exponent (default 9n)");
  reduce->add_option("--beta", beta, "Restart miss exponent (default 7n)");
  reduce->add_option("--to", to, "Game output");

  std::string lambda;
  auto* export_etr = app.add_subcommand("export-etr", "Write the ETR sentence as SMT-LIB 2");
  export_etr->add_option("game", game_path, "Game file")->required();
  export_etr->add_option("--lambda", lambda, "Value threshold P/Q (unnormalised)");
  export_etr->add_option("--state", state, "Queried state (default: first state)");
  export_etr->add_option("--anchor", anchor, "Anchor state with zero potential (default: first state)");
  export_etr->add_option("--to", to, "Sentence output");

  std::string sentence_path, assignment_path;
  double tol = 1e-6;
  auto* check = app.add_subcommand("check-etr", "Substitute an assignment into an exported sentence");
  check->add_option("sentence", sentence_path, "SMT-LIB file")->required();
  check->add_option("assignment", assignment_path, "JSON assignment file")->required();
  check->add_option("--tol", tol, "Tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string command;
  for (const CLI::App* sub = app.get_subcommands().front(); sub;) {
    command += (command.empty() ? "" : " ") + sub->get_name();
    const auto subs = sub->get_subcommands();
    sub = subs.empty() ? nullptr : subs.front();
  }
  RunRecord record(command);
  {
    RecordJson& p = record.parameters();
    for (const CLI::App* sub = &app; sub;) {
      for (const CLI::Option* opt : sub->get_options()) {
        if (opt->get_single_name() == "help" || opt->count() == 0) continue;
        if (opt->get_single_name() == "output" || opt->get_single_name() == "threads") continue;
        const auto& results = opt->results();
        p[opt->get_single_name()] = results.size() == 1 ? RecordJson(results.front()) : RecordJson(results);
      }
      const auto subs = sub->get_subcommands();
      sub = subs.empty() ? nullptr : subs.front();
    }
  }

  const Stopwatch clock;
  int code = 0;
  try {
    if (*validate) {
      run_validate(game_path, record);
    } else if (*classify_cmd) {
      run_classify(game_path, record);
    } else if (*solve) {
      run_solve(so, global, record);
    } else if (*eval) {
      run_eval(game_path, s1_path, s2_path, state, record);
    } else if (*gen_sqrt) {
      emit_game(gen_sqrt_game(sqrt_b), to, record);
    } else if (*gen_sum) {
      emit_game(gen_sqrt_sum(parse_numbers(nums_text), entry == "w" ? SqrtEntry::W : SqrtEntry::U), to, record);
    } else if (*gen_lb) {
      const LowerBoundGame lb = gen_lower_bound(lb_k, Rational::parse(lb_eta));
      emit_game(lb.game, to, record);
      if (!witness_path.empty()) write_text(witness_path, serialize_witness(lb.game, lb.witness));
    } else if (*reduce) {
      run_reduce(ssg_path, state, alpha, beta, to, record);
    } else if (*export_etr) {
      run_export(game_path, lambda, state, anchor, to, record);
    } else if (*check) {
      run_check(sentence_path, assignment_path, tol, record);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    record.results()["error"] = e.what();
    code = 1;
  }
  record.add_timing("total_seconds", clock.seconds());
  if (!global.output.empty()) {
    try {
      write_text(global.output, record.dump());
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return code;
}
