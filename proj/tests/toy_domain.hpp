#pragma once

// Small deterministic domains for exercising the generic search: a scripted
// graph for hand-built examples, and randomly generated complete trees whose
// optimal root action is computable by exhaustive recursion.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "cormcts/mcts.hpp"

namespace toy {

// Explicit transition table: states are indices, edges carry an action id,
// a successor, a value, and a terminal flag. Missing (state, action) pairs
// are infeasible.
struct ScriptedDomain {
  using State = int;
  using Action = int;
  struct Outcome {
    State state = 0;
    double value = 0.0;
    bool terminal = false;
  };
  struct Edge {
    int action = 0;
    int next = 0;
    double value = 0.0;
    bool terminal = false;
  };

  std::vector<std::vector<Edge>> edges;  // indexed by state

  const Edge* find(State s, Action a) const {
    for (const Edge& e : edges[static_cast<std::size_t>(s)])
      if (e.action == a) return &e;
    return nullptr;
  }

  std::vector<Action> candidate_actions(const State& s) const {
    std::vector<Action> out;
    for (const Edge& e : edges[static_cast<std::size_t>(s)]) out.push_back(e.action);
    return out;
  }

  bool feasible(const State& s, Action a) const { return find(s, a) != nullptr; }

  Outcome apply(const State& s, Action a) const {
    const Edge* e = find(s, a);
    if (!e) throw cormcts::InfeasibleAction("scripted edge missing");
    return {e->next, e->value, e->terminal};
  }

  double root_value(const State&) const { return 0.0; }

  double expansion_weight(const std::optional<Action>&, Action) const { return 1.0; }
};

// Complete b-ary tree of the given depth with values drawn uniformly from
// [0.05, 0.95]. Leaves are non-terminal states with no candidate actions, so
// every value enters the accumulated total exactly once while the search
// runs to exhaustion. The optimal root action maximizes the recursive
// discounted sum S(n) = v(n) + gamma * sum over children of S(child).
struct ToyTree {
  struct Domain {
    using State = int;
    using Action = int;
    struct Outcome {
      State state = 0;
      double value = 0.0;
      bool terminal = false;
    };

    const ToyTree* tree = nullptr;

    std::vector<Action> candidate_actions(const State& s) const {
      std::vector<Action> out;
      for (int a = 0; a < tree->child_count(s); ++a) out.push_back(a);
      return out;
    }
    bool feasible(const State& s, Action a) const { return a < tree->child_count(s); }
    Outcome apply(const State& s, Action a) const {
      int c = tree->child(s, a);
      return {c, tree->value[static_cast<std::size_t>(c)], false};
    }
    double root_value(const State&) const { return 0.5; }
    double expansion_weight(const std::optional<Action>&, Action) const { return 1.0; }
  };

  int branching = 1;
  int depth = 1;
  std::vector<double> value;  // per node; root entry unused by the search
  std::vector<int> node_depth;

  static ToyTree random(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ToyTree t;
    t.branching = 1 + static_cast<int>(rng() % 3);
    t.depth = 1 + static_cast<int>(rng() % 3);
    int size = t.size();
    std::uniform_real_distribution<double> dist(0.05, 0.95);
    t.value.resize(static_cast<std::size_t>(size));
    t.node_depth.resize(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) t.value[static_cast<std::size_t>(i)] = dist(rng);
    t.node_depth[0] = 0;
    for (int i = 0; i < size; ++i)
      for (int a = 0; a < t.child_count(i); ++a)
        t.node_depth[static_cast<std::size_t>(t.child(i, a))] = t.node_depth[static_cast<std::size_t>(i)] + 1;
    return t;
  }

  int size() const {
    int total = 0;
    int level = 1;
    for (int d = 0; d <= depth; ++d) {
      total += level;
      level *= branching;
    }
    return total;
  }

  int child(int node, int k) const { return node * branching + k + 1; }

  int child_count(int node) const {
    return node_depth.empty()
               ? 0
               : (node_depth[static_cast<std::size_t>(node)] < depth ? branching : 0);
  }

  // Exhaustive oracle: the same accumulation backpropagation produces, with
  // every node's value counted once at its own depth.
  double discounted_sum(int node, double gamma) const {
    double s = value[static_cast<std::size_t>(node)];
    for (int a = 0; a < child_count(node); ++a) s += gamma * discounted_sum(child(node, a), gamma);
    return s;
  }

  int best_root_action(double gamma) const {
    int best = 0;
    double best_score = discounted_sum(child(0, 0), gamma);
    for (int a = 1; a < child_count(0); ++a) {
      double s = discounted_sum(child(0, a), gamma);
      if (s > best_score) {
        best = a;
        best_score = s;
      }
    }
    return best;
  }
};

inline cormcts::SearchConfig exhaustive_config(int tree_size, std::uint64_t seed) {
  cormcts::SearchConfig config;
  config.rng_seed = seed;
  config.pruning_enabled = true;
  config.budget.max_nodes = tree_size + 64;
  config.budget.wall_clock_enabled = false;
  return config;
}

}  // namespace toy
