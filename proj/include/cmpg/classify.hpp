#pragma once

#include <string>
#include <vector>

#include "cmpg/game.hpp"

namespace cmpg {

// Adjacency lists, sorted and duplicate free.
using StateGraph = std::vector<std::vector<StateIndex>>;
using StateSet = std::vector<StateIndex>;  // sorted

enum class Verdict { Ergodic, SureErgodic, AlmostSureErgodic, None };

std::string to_string(Verdict v);

// Explanation attached to a classification. For verdict None it carries the
// cycle (sure test) and trap (almost-sure test) that defeat the weaker
// classes; rejected bottom SCCs are recorded for every verdict.
struct ClassificationWitness {
  StateSet cycle;                    // states of a cycle avoiding every component
  StateSet trap;                     // nonempty trap outside the components
  std::vector<StateSet> rejected_bottom_sccs;
};

struct Classification {
  std::vector<StateSet> components;  // verified ergodic components, ordered by smallest state
  Verdict verdict = Verdict::None;
  bool ergodic_test = false;
  bool sure_test = false;
  bool almost_sure_test = false;
  ClassificationWitness witness;
};

// Edge (s, t) iff some action pair at s has t in its support.
StateGraph existential_graph(const Game& g);

// States from which `target` is reached with positive probability under every
// strategy profile: the attractor of the support-choosing player in the
// turn-based game where both players jointly pick an action pair and the
// opponent resolves the probabilistic choice.
StateSet guaranteed_reach(const Game& g, const StateSet& target);

// Bottom SCCs of the existential graph that pass the pairwise
// guaranteed-reach verification.
std::vector<StateSet> ergodic_components(const Game& g);

// Largest U inside `region` such that every state of U has an action pair
// whose whole support stays in U (greatest fixpoint). Empty when none exists.
StateSet find_trap(const Game& g, const StateSet& region);

Classification classify(const Game& g);

}  // namespace cmpg
