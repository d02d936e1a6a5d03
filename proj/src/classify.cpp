#include "cmpg/classify.hpp"

#include <algorithm>
#include <functional>

namespace cmpg {

namespace {

// Iterative Tarjan; components come out in reverse topological order.
std::vector<StateSet> strongly_connected_components(const StateGraph& graph) {
  const std::size_t n = graph.size();
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<StateIndex> stack;
  std::vector<StateSet> sccs;
  std::size_t counter = 0;

  struct Frame {
    StateIndex v;
    std::size_t next_edge;
  };
  for (StateIndex root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next_edge < graph[f.v].size()) {
        const StateIndex w = graph[f.v][f.next_edge++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const StateIndex v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        StateSet scc;
        StateIndex w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          scc.push_back(w);
        } while (w != v);
        std::sort(scc.begin(), scc.end());
        sccs.push_back(std::move(scc));
      }
    }
  }
  return sccs;
}

// Finds a cycle inside `allowed` (self-loops count). Returns its states,
// sorted, or empty when the induced subgraph is acyclic.
StateSet find_cycle(const StateGraph& graph, const std::vector<bool>& allowed) {
  const std::size_t n = graph.size();
  enum Color { White, Grey, Black };
  std::vector<Color> color(n, White);
  std::vector<StateIndex> parent(n, 0);
  for (StateIndex root = 0; root < n; ++root) {
    if (!allowed[root] || color[root] != White) continue;
    std::vector<std::pair<StateIndex, std::size_t>> call{{root, 0}};
    color[root] = Grey;
    while (!call.empty()) {
      auto& [v, next] = call.back();
      if (next < graph[v].size()) {
        const StateIndex w = graph[v][next++];
        if (!allowed[w]) continue;
        if (color[w] == Grey) {
          StateSet cycle{w};
          for (StateIndex x = v; x != w; x = parent[x]) cycle.push_back(x);
          std::sort(cycle.begin(), cycle.end());
          return cycle;
        }
        if (color[w] == White) {
          color[w] = Grey;
          parent[w] = v;
          call.emplace_back(w, 0);
        }
        continue;
      }
      color[v] = Black;
      call.pop_back();
    }
  }
  return {};
}

bool every_pair(const Game& g, StateIndex s, const std::function<bool(const Transition&)>& pred) {
  for (ActionIndex a1 = 0; a1 < g.num_actions1(s); ++a1) {
    for (ActionIndex a2 = 0; a2 < g.num_actions2(s); ++a2) {
      if (!pred(g.transition(s, a1, a2))) return false;
    }
  }
  return true;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Ergodic:
      return "Ergodic";
    case Verdict::SureErgodic:
      return "SureErgodic";
    case Verdict::AlmostSureErgodic:
      return "AlmostSureErgodic";
    case Verdict::None:
      break;
  }
  return "None";
}

StateGraph existential_graph(const Game& g) {
  StateGraph graph(g.num_states());
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    auto& out = graph[s];
    for (ActionIndex a1 = 0; a1 < g.num_actions1(s); ++a1) {
      for (ActionIndex a2 = 0; a2 < g.num_actions2(s); ++a2) {
        for (const Successor& succ : g.transition(s, a1, a2).successors) out.push_back(succ.state);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  return graph;
}

StateSet guaranteed_reach(const Game& g, const StateSet& target) {
  std::vector<bool> in(g.num_states(), false);
  for (StateIndex t : target) in.at(t) = true;
  // A state joins when every action pair offers a successor already inside.
  bool changed = true;
  while (changed) {
    changed = false;
    for (StateIndex s = 0; s < g.num_states(); ++s) {
      if (in[s]) continue;
      const bool forced = every_pair(g, s, [&](const Transition& t) {
        return std::any_of(t.successors.begin(), t.successors.end(),
                           [&](const Successor& x) { return in[x.state]; });
      });
      if (forced) {
        in[s] = true;
        changed = true;
      }
    }
  }
  StateSet out;
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    if (in[s]) out.push_back(s);
  }
  return out;
}

namespace {

struct Decomposition {
  std::vector<StateSet> accepted;
  std::vector<StateSet> rejected;
};

Decomposition decompose(const Game& g) {
  const StateGraph graph = existential_graph(g);
  std::vector<std::size_t> scc_of(g.num_states());
  const std::vector<StateSet> sccs = strongly_connected_components(graph);
  for (std::size_t k = 0; k < sccs.size(); ++k) {
    for (StateIndex s : sccs[k]) scc_of[s] = k;
  }
  Decomposition out;
  for (std::size_t k = 0; k < sccs.size(); ++k) {
    const StateSet& scc = sccs[k];
    const bool bottom = std::all_of(scc.begin(), scc.end(), [&](StateIndex s) {
      return std::all_of(graph[s].begin(), graph[s].end(), [&](StateIndex t) { return scc_of[t] == k; });
    });
    if (!bottom) continue;
    bool verified = true;
    for (StateIndex t : scc) {
      const StateSet reach = guaranteed_reach(g, {t});
      if (!std::includes(reach.begin(), reach.end(), scc.begin(), scc.end())) {
        verified = false;
        break;
      }
    }
    (verified ? out.accepted : out.rejected).push_back(scc);
  }
  const auto by_front = [](const StateSet& a, const StateSet& b) { return a.front() < b.front(); };
  std::sort(out.accepted.begin(), out.accepted.end(), by_front);
  std::sort(out.rejected.begin(), out.rejected.end(), by_front);
  return out;
}

}  // namespace

std::vector<StateSet> ergodic_components(const Game& g) { return decompose(g).accepted; }

StateSet find_trap(const Game& g, const StateSet& region) {
  std::vector<bool> in(g.num_states(), false);
  for (StateIndex s : region) in.at(s) = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (StateIndex s = 0; s < g.num_states(); ++s) {
      if (!in[s]) continue;
      const bool can_stay = !every_pair(g, s, [&](const Transition& t) {
        return !std::all_of(t.successors.begin(), t.successors.end(),
                            [&](const Successor& x) { return in[x.state]; });
      });
      if (!can_stay) {
        in[s] = false;
        changed = true;
      }
    }
  }
  StateSet out;
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    if (in[s]) out.push_back(s);
  }
  return out;
}

Classification classify(const Game& g) {
  Classification out;
  Decomposition d = decompose(g);
  out.components = std::move(d.accepted);
  out.witness.rejected_bottom_sccs = std::move(d.rejected);

  std::vector<bool> outside(g.num_states(), true);
  std::size_t covered = 0;
  for (const StateSet& c : out.components) {
    for (StateIndex s : c) {
      outside[s] = false;
      ++covered;
    }
  }
  StateSet rest;
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    if (outside[s]) rest.push_back(s);
  }

  out.ergodic_test = out.components.size() == 1 && covered == g.num_states();
  out.witness.cycle = find_cycle(existential_graph(g), outside);
  out.sure_test = !out.components.empty() && out.witness.cycle.empty();
  out.witness.trap = find_trap(g, rest);
  out.almost_sure_test = !out.components.empty() && out.witness.trap.empty();

  if (out.ergodic_test) {
    out.verdict = Verdict::Ergodic;
  } else if (out.sure_test) {
    out.verdict = Verdict::SureErgodic;
  } else if (out.almost_sure_test) {
    out.verdict = Verdict::AlmostSureErgodic;
  }
  return out;
}

}  // namespace cmpg
