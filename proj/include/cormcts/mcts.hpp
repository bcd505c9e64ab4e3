#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "cormcts/dynamics.hpp"
#include "cormcts/utility.hpp"
#include "cormcts/world.hpp"

namespace cormcts {

struct EmptyTree : std::runtime_error {
  explicit EmptyTree(const std::string& what) : std::runtime_error(what) {}
};

struct SearchBudget {
  double max_wall_time_s = 1.0;
  int max_nodes = 50;
  // Cleared for bit-reproducible searches (node cap / exhaustion only).
  bool wall_clock_enabled = true;
};

// Termination backstop for wall-clock-free searches: selection can pin on a
// dominant terminal leaf and revisit it indefinitely without growing the
// tree (the UCB exploration bonus unwinds only logarithmically), so total
// iterations are capped at this multiple of the node budget. Nominal
// searches stay far below it; only degenerate revisit spins are cut short.
inline constexpr int kIterationsPerNodeCap = 20;

enum class DecisionRule { Accumulated, Mean };

struct SearchConfig {
  double exploration_c = std::numbers::sqrt2;
  double gamma = 0.9;
  // Probability mass given to the four keep-lane-style actions when expanding
  // a node that was itself reached via a lane change; lane changes share the
  // remainder. Expansion elsewhere samples uniformly.
  double lane_keep_bias_after_lane_change = 0.9;
  bool pruning_enabled = true;
  DecisionRule decision_rule = DecisionRule::Accumulated;
  SearchBudget budget;
  std::uint64_t rng_seed = 0;
};

struct SearchStats {
  int iterations = 0;        // backpropagations (root visit count)
  int nodes = 0;             // tree size including the root
  int wasted_draws = 0;      // unpruned draws that hit an infeasible action
  int pruned_draws = 0;      // draws discarded for a zero-value successor
  int zero_value_nodes = 0;  // children attached carrying an evaluated v of 0
  int max_depth = 0;
  double elapsed_s = 0.0;
  bool exhausted = false;    // stopped because nothing was left to expand
};

// Upper confidence bound for UCT selection: mean + c*sqrt(ln(parent m)/m),
// with an infinite sentinel so unvisited nodes are selected first.
inline double ucb_value(double node_mean_u, int parent_visits, int node_visits, double c) {
  if (node_visits == 0) return std::numeric_limits<double>::infinity();
  return node_mean_u + c * std::sqrt(std::log(static_cast<double>(parent_visits)) /
                                     static_cast<double>(node_visits));
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t z = base + (salt + 1) * 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Generic anytime best-first search over a domain supplying:
//   State; Action (equality-comparable);
//   struct Outcome { State state; double value; bool terminal; };
//   std::vector<Action> candidate_actions(const State&) const;
//   bool feasible(const State&, Action) const;
//   Outcome apply(const State&, Action) const;      // one simulated maneuver
//   double root_value(const State&) const;          // informational only
//   double expansion_weight(const std::optional<Action>& incoming, Action) const;
//
// Each iteration descends by cached UCB to the first node that still has an
// untried feasible action (or a terminal node, whose stored v is simply
// re-backpropagated), simulates one drawn action, attaches at most one child,
// and backpropagates the child's value with discount gamma per hop.
//
// With pruning enabled the draw support is the untried feasible actions and a
// zero-value successor is discarded (the action marked tried) before
// redrawing; with pruning disabled the draw covers all candidates, an
// infeasible draw is a wasted iteration, and duplicate or zero-value children
// attach like any other.
template <typename Domain>
class Search {
 public:
  using State = typename Domain::State;
  using Action = typename Domain::Action;
  using Outcome = typename Domain::Outcome;

  struct Node {
    State state;
    std::optional<Action> action;  // edge from parent; absent at root
    double v = 0.0;
    int m = 0;
    double u = 0.0;
    double ucb = std::numeric_limits<double>::infinity();
    int parent = -1;
    int depth = 0;
    bool terminal = false;
    int self_sims = 0;  // times this node itself was the backpropagation leaf
    std::vector<int> children;
    std::vector<Action> tried;
    std::vector<Action> feasible;
  };

  Search(const Domain& domain, const SearchConfig& config, const State& root_state)
      : domain_(domain), config_(config), rng_(config.rng_seed) {
    Node root;
    root.state = root_state;
    root.v = domain_.root_value(root_state);
    root.feasible = feasible_actions(root_state);
    nodes_.reserve(static_cast<std::size_t>(
        std::min(config_.budget.max_nodes, 4096)));
    nodes_.push_back(std::move(root));
    start_ = clock::now();
  }

  // Runs iterations until a budget limit or tree exhaustion.
  void run() {
    while (step()) {
    }
    stats_.elapsed_s = elapsed();
    stats_.nodes = static_cast<int>(nodes_.size());
  }

  // One iteration (one backpropagation). Returns false without working when
  // the budget is spent or no node can be expanded or revisited.
  bool step() {
    if (static_cast<int>(nodes_.size()) >= config_.budget.max_nodes) return false;
    if (stats_.iterations >= kIterationsPerNodeCap * config_.budget.max_nodes) return false;
    if (config_.budget.wall_clock_enabled && elapsed() >= config_.budget.max_wall_time_s)
      return false;

    int guard = static_cast<int>(nodes_.size()) + 1;
    while (guard-- > 0) {
      if (exhausted()) {
        stats_.exhausted = true;
        return false;
      }
      int leaf = select_leaf();
      Node& n = nodes_[static_cast<std::size_t>(leaf)];
      if (n.terminal) {
        backpropagate(leaf, n.v);
        return true;
      }
      int child = expand_at(leaf);
      if (child >= 0 || child == kDeadEnd) return true;  // backpropagated
      if (child == kWasted) {
        ++stats_.wasted_draws;  // spent draw, nothing learned, budget rechecked
        return true;
      }
      // kNoAttach: the node just became fully expanded without adding a
      // child; reselect within the same iteration.
    }
    return false;
  }

  // Walks from the root along maximal cached UCB (ties to the earliest
  // child) and returns the first terminal node, node with an untried
  // feasible action, or childless dead end.
  int select_leaf() const {
    int idx = 0;
    while (true) {
      const Node& n = nodes_[static_cast<std::size_t>(idx)];
      if (n.terminal || expandable(n) || n.children.empty()) return idx;
      int best = n.children.front();
      double best_ucb = nodes_[static_cast<std::size_t>(best)].ucb;
      for (std::size_t i = 1; i < n.children.size(); ++i) {
        int c = n.children[i];
        double u = nodes_[static_cast<std::size_t>(c)].ucb;
        if (u > best_ucb) {
          best = c;
          best_ucb = u;
        }
      }
      idx = best;
    }
  }

  static constexpr int kWasted = -1;
  static constexpr int kNoAttach = -2;
  static constexpr int kDeadEnd = -3;

  // Draws one action at `leaf` per the pruning mode, simulates it, and
  // attaches + backpropagates the child. Returns the child id; kWasted for
  // an unpruned infeasible draw; kNoAttach when the support emptied but the
  // leaf already has children (it is now fully expanded); kDeadEnd when the
  // leaf has no viable action at all (it becomes terminal with v = 0 and
  // that value is backpropagated).
  int expand_at(int leaf) {
    Node& n = nodes_[static_cast<std::size_t>(leaf)];
    if (config_.pruning_enabled) {
      while (true) {
        std::vector<Action> support;
        for (const Action& a : n.feasible)
          if (!is_tried(n, a)) support.push_back(a);
        if (support.empty()) {
          if (n.children.empty()) return dead_end(leaf);
          return kNoAttach;
        }
        Action a = draw(n.action, support);
        Outcome out = domain_.apply(n.state, a);
        if (out.value == 0.0) {
          n.tried.push_back(a);
          ++stats_.pruned_draws;
          continue;
        }
        return attach(leaf, a, std::move(out));
      }
    }
    if (n.feasible.empty()) return dead_end(leaf);
    std::vector<Action> all = domain_.candidate_actions(n.state);
    Action a = draw(n.action, all);
    // Unpruned sampling has no feasibility filter: the drawn maneuver goes
    // straight to the simulator, and an infeasible one costs the failed
    // simulation attempt.
    try {
      Outcome out = domain_.apply(n.state, a);
      return attach(leaf, a, std::move(out));
    } catch (const InfeasibleAction&) {
      return kWasted;
    }
  }

  // Adds gamma^t * value and one visit to every node from `leaf` up to the
  // root (t = 0 at the leaf), then refreshes the cached UCB of the nodes on
  // that path and their siblings.
  void backpropagate(int leaf, double value) {
    ++stats_.iterations;
    nodes_[static_cast<std::size_t>(leaf)].self_sims++;
    double contribution = value;
    for (int idx = leaf; idx != -1;) {
      Node& n = nodes_[static_cast<std::size_t>(idx)];
      n.m += 1;
      n.u += contribution;
      contribution *= config_.gamma;
      idx = n.parent;
    }
    for (int idx = leaf; idx != -1;) {
      const Node& n = nodes_[static_cast<std::size_t>(idx)];
      int parent = n.parent;
      if (parent >= 0) {
        const Node& p = nodes_[static_cast<std::size_t>(parent)];
        for (int c : p.children) refresh_ucb(c);
      }
      idx = parent;
    }
  }

  // Root child with maximal accumulated U (or mean U under the Mean rule);
  // ties resolve to the earliest-attached child.
  Action best_root_action() const {
    const Node& root = nodes_.front();
    if (root.children.empty()) throw EmptyTree("search produced no root children");
    int best = root.children.front();
    double best_score = decision_score(best);
    for (std::size_t i = 1; i < root.children.size(); ++i) {
      double s = decision_score(root.children[i]);
      if (s > best_score) {
        best = root.children[i];
        best_score = s;
      }
    }
    return *nodes_[static_cast<std::size_t>(best)].action;
  }

  const std::vector<Node>& nodes() const { return nodes_; }

  SearchStats stats() const {
    SearchStats s = stats_;
    s.nodes = static_cast<int>(nodes_.size());
    s.elapsed_s = elapsed();
    s.max_depth = 0;
    for (const Node& n : nodes_) s.max_depth = std::max(s.max_depth, n.depth);
    return s;
  }

 private:
  using clock = std::chrono::steady_clock;

  double elapsed() const {
    return std::chrono::duration<double>(clock::now() - start_).count();
  }

  std::vector<Action> feasible_actions(const State& s) const {
    std::vector<Action> out;
    for (const Action& a : domain_.candidate_actions(s))
      if (domain_.feasible(s, a)) out.push_back(a);
    return out;
  }

  static bool is_tried(const Node& n, const Action& a) {
    return std::find(n.tried.begin(), n.tried.end(), a) != n.tried.end();
  }

  int dead_end(int leaf) {
    Node& n = nodes_[static_cast<std::size_t>(leaf)];
    n.terminal = true;
    n.v = 0.0;
    backpropagate(leaf, 0.0);
    return kDeadEnd;
  }

  bool expandable(const Node& n) const {
    if (n.terminal) return false;
    for (const Action& a : n.feasible)
      if (!is_tried(n, a)) return true;
    return false;
  }

  bool exhausted() const {
    for (const Node& n : nodes_)
      if (expandable(n)) return false;
    return true;
  }

  double uniform01() {
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }

  Action draw(const std::optional<Action>& incoming, const std::vector<Action>& support) {
    double total = 0.0;
    weights_.clear();
    for (const Action& a : support) {
      double w = domain_.expansion_weight(incoming, a);
      weights_.push_back(w);
      total += w;
    }
    if (total <= 0.0) {  // degenerate bias: fall back to uniform
      weights_.assign(support.size(), 1.0);
      total = static_cast<double>(support.size());
    }
    double u = uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
      acc += weights_[i];
      if (u < acc) return support[i];
    }
    return support.back();
  }

  int attach(int leaf, const Action& a, Outcome&& out) {
    if (out.value == 0.0) ++stats_.zero_value_nodes;
    int id = static_cast<int>(nodes_.size());
    Node child;
    child.state = std::move(out.state);
    child.action = a;
    child.v = out.value;
    child.terminal = out.terminal;
    child.parent = leaf;
    child.depth = nodes_[static_cast<std::size_t>(leaf)].depth + 1;
    if (!child.terminal) child.feasible = feasible_actions(child.state);
    nodes_.push_back(std::move(child));
    Node& parent = nodes_[static_cast<std::size_t>(leaf)];
    parent.children.push_back(id);
    if (!is_tried(parent, a)) parent.tried.push_back(a);
    backpropagate(id, nodes_[static_cast<std::size_t>(id)].v);
    return id;
  }

  void refresh_ucb(int idx) {
    Node& n = nodes_[static_cast<std::size_t>(idx)];
    if (n.parent < 0) return;
    const Node& p = nodes_[static_cast<std::size_t>(n.parent)];
    n.ucb = n.m == 0 ? std::numeric_limits<double>::infinity()
                     : ucb_value(n.u / n.m, p.m, n.m, config_.exploration_c);
  }

  double decision_score(int idx) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    if (config_.decision_rule == DecisionRule::Mean)
      return n.m > 0 ? n.u / n.m : 0.0;
    return n.u;
  }

  const Domain& domain_;
  SearchConfig config_;
  std::mt19937_64 rng_;
  std::vector<Node> nodes_;
  std::vector<double> weights_;
  SearchStats stats_;
  clock::time_point start_;
};

// Driving instantiation: states are worlds, one simulated maneuver spans
// action_duration_s with every fault latched, values come from the resource
// evaluator, and terminal means the mission resolved either way.
struct DrivingDomain {
  using State = WorldState;
  using Action = ManeuverAction;
  struct Outcome {
    WorldState state;
    double value = 0.0;
    bool terminal = false;
  };

  const RoadNetwork* net = nullptr;
  const UtilityWeights* weights = nullptr;
  const DynamicsParams* dynamics = nullptr;
  VehicleModel model = VehicleModel::ConstantSpeed;
  double lane_keep_bias = 0.9;

  std::vector<ManeuverAction> candidate_actions(const WorldState&) const;
  bool feasible(const WorldState& w, ManeuverAction a) const;
  Outcome apply(const WorldState& w, ManeuverAction a) const;
  double root_value(const WorldState& w) const;
  double expansion_weight(const std::optional<ManeuverAction>& incoming,
                          ManeuverAction a) const;
};

// Flat export of one tree node for traces and tests.
struct NodeRecord {
  int id = 0;
  int parent = -1;
  std::optional<ManeuverAction> action;
  int depth = 0;
  double v = 0.0;
  int m = 0;
  double u = 0.0;
  bool terminal = false;
  WorldState world;
};

struct PlanResult {
  ManeuverAction action = ManeuverAction::KeepLaneSameSpeed;
  SearchStats stats;
  std::vector<NodeRecord> tree;  // populated only when requested
};

// One full search from `world`, returning the child action with the largest
// accumulated U (or the mean variant per config).
PlanResult plan(const WorldState& world, const RoadNetwork& net, const SearchConfig& config,
                const UtilityWeights& weights, const DynamicsParams& dynamics,
                VehicleModel model, bool export_tree = false);

}  // namespace cormcts
