// Acceptance harness: exercises every top-level requirement end to end and
// prints one [PASS]/[FAIL] line per criterion. Exits with the number of
// failed criteria, so the test runner reports any regression.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cormcts/baseline.hpp"
#include "cormcts/dynamics.hpp"
#include "cormcts/harness.hpp"
#include "cormcts/mcts.hpp"
#include "cormcts/scenario.hpp"
#include "toy_domain.hpp"

using namespace cormcts;

namespace {

int g_failures = 0;

void report(int index, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", index, name,
              detail.c_str());
  if (!ok) ++g_failures;
}

std::string scenario_file(const char* name) {
  return std::string(SCENARIO_DIR) + "/" + name;
}

RunOverrides deterministic_overrides(std::uint64_t seed) {
  RunOverrides o;
  o.seed = seed;
  o.deterministic = true;
  return o;
}

struct OutcomeSplit {
  int fixed_failures = 0;
  bool fixed_identical = true;
  bool fixed_first_action_is_left_change = true;
  int tree_successes = 0;
  int runs = 0;
};

// Twenty seeds through both planners with node-cap-only budgets.
OutcomeSplit split_outcomes(const ScenarioConfig& config) {
  OutcomeSplit split;
  split.runs = 20;

  std::vector<ManeuverAction> reference_actions;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RunTrace fixed = run_scenario(config, PlannerKind::Fixed, deterministic_overrides(seed));
    if (fixed.outcome == MissionStatus::Failure) ++split.fixed_failures;
    if (fixed.ticks.empty() ||
        fixed.ticks[0].action != ManeuverAction::ChangeLaneLeft)
      split.fixed_first_action_is_left_change = false;
    std::vector<ManeuverAction> actions;
    for (const TickRecord& t : fixed.ticks) actions.push_back(t.action);
    if (seed == 0)
      reference_actions = actions;
    else if (actions != reference_actions)
      split.fixed_identical = false;

    RunTrace tree = run_scenario(config, PlannerKind::CorMcts, deterministic_overrides(seed));
    if (tree.outcome == MissionStatus::Success) ++split.tree_successes;
  }
  return split;
}

void criterion_scenario(int index, const char* name, const char* file,
                        bool require_left_change_first) {
  ScenarioConfig config = load_scenario(scenario_file(file));
  OutcomeSplit split = split_outcomes(config);

  bool ok = split.fixed_failures == split.runs && split.fixed_identical &&
            split.tree_successes >= 18 &&
            (!require_left_change_first || split.fixed_first_action_is_left_change);
  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "fixed-horizon Failure %d/%d (identical across seeds: %s%s); "
                "tree search Success %d/%d (want >= 18)",
                split.fixed_failures, split.runs, split.fixed_identical ? "yes" : "no",
                require_left_change_first
                    ? (split.fixed_first_action_is_left_change
                           ? ", first action is the left change"
                           : ", first action is NOT the left change")
                    : "",
                split.tree_successes, split.runs);
  report(index, name, ok, detail);
}

void criterion_selection_bound() {
  const double c = std::numbers::sqrt2;
  double worked = 0.5 + c * std::sqrt(std::log(8.0) / 2.0);
  bool ok = std::abs(ucb_value(0.5, 1, 1, c) - 0.5) < 1e-9 &&
            std::abs(ucb_value(0.5, 8, 2, c) - worked) < 1e-9 &&
            std::isinf(ucb_value(0.7, 5, 0, c));
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "ucb(0.5, M=8, m=2, c=sqrt2) = %.9f vs hand-computed %.9f; "
                "unvisited nodes rank infinite",
                ucb_value(0.5, 8, 2, c), worked);
  report(3, "selection bound worked values", ok, detail);
}

void criterion_backpropagation_chain() {
  toy::ScriptedDomain chain;
  chain.edges = {
      {{0, 1, 0.0, false}},
      {{0, 2, 0.8, true}},
      {},
  };
  SearchConfig config;
  config.pruning_enabled = false;  // the intermediate state carries v = 0
  config.budget.max_nodes = 3;
  config.budget.wall_clock_enabled = false;
  config.rng_seed = 1;

  Search<toy::ScriptedDomain> search(chain, config, 0);
  search.run();
  bool ok = search.nodes().size() == 3 &&
            std::abs(search.nodes()[2].u - 0.8) < 1e-12 &&
            std::abs(search.nodes()[1].u - 0.72) < 1e-12 &&
            std::abs(search.nodes()[0].u - 0.648) < 1e-12;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "one depth-2 simulation of 0.8 added U = %.12f / %.12f / %.12f "
                "at leaf / parent / root (want 0.8 / 0.72 / 0.648)",
                search.nodes().size() > 2 ? search.nodes()[2].u : -1.0,
                search.nodes().size() > 1 ? search.nodes()[1].u : -1.0,
                search.nodes()[0].u);
  report(4, "discounted backpropagation chain", ok, detail);
}

void criterion_budget() {
  ScenarioConfig config = load_scenario(scenario_file("scenario1_end_of_lane.json"));

  SearchConfig node_capped = config.search;
  node_capped.budget.max_nodes = 50;
  node_capped.budget.max_wall_time_s = 30.0;  // ample
  node_capped.rng_seed = 7;
  PlanResult by_nodes = plan(config.initial, config.network, node_capped, config.weights,
                             config.dynamics, config.other_vehicle_model);

  SearchConfig time_capped = config.search;
  time_capped.budget.max_nodes = 1000000;
  time_capped.budget.max_wall_time_s = 1.0;
  time_capped.rng_seed = 7;
  auto t0 = std::chrono::steady_clock::now();
  PlanResult by_time = plan(config.initial, config.network, time_capped, config.weights,
                            config.dynamics, config.other_vehicle_model);
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  bool ok = by_nodes.stats.nodes == 50 && elapsed < 1.05;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "node cap 50 with ample time -> %d nodes (want exactly 50); "
                "1.0 s cap with a huge node budget returned in %.3f s (< 1.05), %d nodes",
                by_nodes.stats.nodes, elapsed, by_time.stats.nodes);
  report(5, "budget enforcement", ok, detail);
}

void criterion_toy_oracle() {
  int agreements = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    toy::ToyTree tree = toy::ToyTree::random(5000 + seed);
    toy::ToyTree::Domain domain;
    domain.tree = &tree;
    SearchConfig config = toy::exhaustive_config(tree.size(), seed);
    Search<toy::ToyTree::Domain> search(domain, config, 0);
    search.run();
    if (search.stats().exhausted &&
        static_cast<int>(search.nodes().size()) == tree.size() &&
        search.best_root_action() == tree.best_root_action(config.gamma))
      ++agreements;
  }
  char detail[96];
  std::snprintf(detail, sizeof(detail),
                "exhaustive search agreed with the recursive oracle in %d/100 domains",
                agreements);
  report(6, "oracle agreement on generated toy domains", agreements == 100, detail);
}

void criterion_pruning() {
  // Direction clause: per-call planning times under a fixed node cap, with
  // pruned and unpruned runs interleaved per (scenario, seed, repetition) so
  // machine drift cancels; medians pooled over both scenarios x 20 seeds.
  // The cap of 400 is large enough for the timing difference between the two
  // modes to rise above scheduler noise (at the default cap of 50 the two
  // medians sit within ~1% of each other and the comparison is a coin flip).
  constexpr int kTimingNodeCap = 400;
  std::vector<double> pruned_ms;
  std::vector<double> unpruned_ms;
  for (const char* file : {"scenario1_end_of_lane.json", "scenario2_exit_ramp.json"}) {
    ScenarioConfig config = load_scenario(scenario_file(file));
    for (int rep = 0; rep < 3; ++rep) {
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        for (bool pruning : {true, false}) {
          RunOverrides o = deterministic_overrides(seed);
          o.max_nodes = kTimingNodeCap;
          o.pruning_enabled = pruning;
          RunTrace trace = run_scenario(config, PlannerKind::CorMcts, o);
          auto& sink = pruning ? pruned_ms : unpruned_ms;
          sink.insert(sink.end(), trace.planner_ms_all.begin(), trace.planner_ms_all.end());
        }
      }
    }
  }
  double median_pruned = median(pruned_ms);
  double median_unpruned = median(unpruned_ms);
  bool direction_ok = median_pruned < median_unpruned;

  // Zero-value clause: pruned trees never retain worthless non-terminal
  // children; unpruned trees do.
  ScenarioConfig config = load_scenario(scenario_file("scenario1_end_of_lane.json"));
  RunOverrides pruned_run = deterministic_overrides(0);
  pruned_run.max_nodes = kTimingNodeCap;
  pruned_run.pruning_enabled = true;
  RunOverrides unpruned_run = pruned_run;
  unpruned_run.pruning_enabled = false;
  long pruned_zero_nodes = 0;
  long unpruned_zero_nodes = 0;
  for (const TickRecord& t :
       run_scenario(config, PlannerKind::CorMcts, pruned_run).ticks)
    pruned_zero_nodes += t.search.zero_value_nodes;
  for (const TickRecord& t :
       run_scenario(config, PlannerKind::CorMcts, unpruned_run).ticks)
    unpruned_zero_nodes += t.search.zero_value_nodes;
  bool zero_ok = pruned_zero_nodes == 0 && unpruned_zero_nodes > 0;

  char detail[256];
  std::snprintf(
      detail, sizeof(detail),
      "median per-call time %.3f ms pruned vs %.3f ms unpruned over %zu + %zu calls "
      "(direction clause %s); zero-value nodes %ld pruned vs %ld unpruned (clause %s)",
      median_pruned, median_unpruned, pruned_ms.size(), unpruned_ms.size(),
      direction_ok ? "met" : "NOT met", pruned_zero_nodes, unpruned_zero_nodes,
      zero_ok ? "met" : "NOT met");
  report(7, "pruning effect", direction_ok && zero_ok, detail);
}

void criterion_invariants() {
  long cases = 0;
  long violations = 0;
  auto check = [&](bool ok) {
    ++cases;
    if (!ok) ++violations;
  };

  // Tree invariants across closed-loop searches in both modes.
  for (const char* file : {"scenario1_end_of_lane.json", "scenario2_exit_ramp.json"}) {
    ScenarioConfig config = load_scenario(scenario_file(file));
    DrivingDomain domain;
    domain.net = &config.network;
    domain.weights = &config.weights;
    domain.dynamics = &config.dynamics;
    domain.model = config.other_vehicle_model;
    domain.lane_keep_bias = config.search.lane_keep_bias_after_lane_change;

    for (bool pruning : {true, false}) {
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SearchConfig sc = config.search;
        sc.budget.max_nodes = 50;
        sc.budget.wall_clock_enabled = false;
        sc.pruning_enabled = pruning;
        sc.rng_seed = seed;
        Search<DrivingDomain> search(domain, sc, config.initial);
        search.run();
        const auto& nodes = search.nodes();
        for (const auto& n : nodes) {
          check(n.v >= 0.0 && n.v <= 1.0);
          check(n.u <= static_cast<double>(n.m) + 1e-9 && n.u >= -1e-12);
          int child_visits = 0;
          for (int cidx : n.children)
            child_visits += nodes[static_cast<std::size_t>(cidx)].m;
          check(n.m == child_visits + n.self_sims);
        }
        check(nodes[0].m == search.stats().iterations);
      }
    }
  }

  // Speeds stay non-negative under random maneuvers.
  {
    ScenarioConfig config = load_scenario(scenario_file("scenario1_end_of_lane.json"));
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> s_dist(0.0, 280.0);
    std::uniform_real_distribution<double> v_dist(0.0, 20.0);
    std::uniform_real_distribution<double> dt_dist(0.1, 3.0);
    for (int trial = 0; trial < 2500; ++trial) {
      WorldState w = config.initial;
      w.ego.s_m = s_dist(rng);
      w.ego.speed_mps = v_dist(rng);
      w.others[0].s_m = s_dist(rng);
      w.others[0].speed_mps = v_dist(rng);
      ManeuverAction a = kAllActions[rng() % kAllActions.size()];
      if (!action_feasible(config.network, w, a)) a = ManeuverAction::KeepLaneSameSpeed;
      WorldState out = advance(config.network, w, a, config.dynamics,
                               config.other_vehicle_model, dt_dist(rng), true);
      check(out.ego.speed_mps >= 0.0);
      for (const VehicleState& v : out.others) check(v.speed_mps >= 0.0);
    }
  }

  // Every recorded trace replays tick for tick from its own actions.
  for (const char* file : {"scenario1_end_of_lane.json", "scenario2_exit_ramp.json"}) {
    ScenarioConfig config = load_scenario(scenario_file(file));
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      RunTrace trace =
          run_scenario(config, PlannerKind::CorMcts, deterministic_overrides(seed));
      WorldState world = config.initial;
      for (const TickRecord& t : trace.ticks) {
        check(action_feasible(config.network, world, t.action));
        world = advance(config.network, world, t.action, config.dynamics,
                        config.other_vehicle_model, config.replan_period_s, true);
        check(world.ego.lane == t.world.ego.lane);
        check(std::abs(world.ego.s_m - t.world.ego.s_m) < 1e-9);
        check(std::abs(world.ego.speed_mps - t.world.ego.speed_mps) < 1e-9);
        check(world.fault == t.world.fault);
      }
    }
  }

  char detail[128];
  std::snprintf(detail, sizeof(detail), "%ld checked cases, %ld violations (want >= 10000, 0)",
                cases, violations);
  report(8, "invariant fuzz", cases >= 10000 && violations == 0, detail);
}

void criterion_determinism() {
  bool ok = true;
  for (const char* file : {"scenario1_end_of_lane.json", "scenario2_exit_ramp.json"}) {
    ScenarioConfig config = load_scenario(scenario_file(file));
    for (PlannerKind planner : {PlannerKind::CorMcts, PlannerKind::Fixed}) {
      RunTrace a = run_scenario(config, planner, deterministic_overrides(3));
      RunTrace b = run_scenario(config, planner, deterministic_overrides(3));
      if (trace_to_jsonl(a, config) != trace_to_jsonl(b, config)) ok = false;
    }
  }
  report(9, "deterministic trace reproducibility", ok,
         ok ? "repeated seeded runs serialize byte-identically for both planners and scenarios"
            : "trace bytes differed between identically seeded runs");
}

}  // namespace

int main() {
  auto t0 = std::chrono::steady_clock::now();

  criterion_scenario(1, "end-of-lane outcome split", "scenario1_end_of_lane.json",
                     /*require_left_change_first=*/true);
  criterion_scenario(2, "exit-ramp outcome split", "scenario2_exit_ramp.json",
                     /*require_left_change_first=*/false);
  criterion_selection_bound();
  criterion_backpropagation_chain();
  criterion_budget();
  criterion_toy_oracle();
  criterion_pruning();
  criterion_invariants();
  criterion_determinism();

  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d/9 criteria passed in %.1f s\n", 9 - g_failures, elapsed);
  return g_failures;
}
