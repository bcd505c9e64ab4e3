#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cormcts/scenario.hpp"

namespace cormcts {

enum class PlannerKind { CorMcts, Fixed };

const char* to_string(PlannerKind p);
std::optional<PlannerKind> planner_from_string(const std::string& name);

struct RunOverrides {
  std::optional<double> budget_ms;
  std::optional<int> max_nodes;
  std::optional<bool> pruning_enabled;
  std::optional<std::uint64_t> seed;
  std::optional<DecisionRule> decision_rule;
  // Node-cap-only budgets plus zeroed recorded planner times: two runs with
  // the same seed then produce byte-identical traces.
  bool deterministic = false;
};

struct TickRecord {
  int tick = 0;
  double time_s = 0.0;  // decision time; the rest of the record is post-step
  ManeuverAction action = ManeuverAction::KeepLaneSameSpeed;
  double planner_ms = 0.0;
  WorldState world;  // after applying the action for one replan period
  MissionStatus status = MissionStatus::InProgress;
  SearchStats search;                   // cormcts only
  std::vector<NodeRecord> tree;         // cormcts only
  std::vector<FixedHorizonRow> table;   // fixed only
};

struct RunTrace {
  std::string scenario;
  PlannerKind planner = PlannerKind::CorMcts;
  std::uint64_t seed = 0;
  bool deterministic = false;
  std::vector<TickRecord> ticks;
  MissionStatus outcome = MissionStatus::InProgress;
  double planner_ms_min = 0.0;
  double planner_ms_median = 0.0;
  double planner_ms_max = 0.0;
  std::vector<double> planner_ms_all;  // real measurements, even when the
                                       // recorded per-tick values are zeroed
};

RunTrace run_scenario(const ScenarioConfig& config, PlannerKind planner,
                      const RunOverrides& overrides);

// One tick line per JSONL row, bracketed by a header and a result row.
std::string trace_to_jsonl(const RunTrace& trace, const ScenarioConfig& config);
void write_trace(const RunTrace& trace, const ScenarioConfig& config,
                 const std::string& path);

struct BatchCell {
  std::string scenario;
  PlannerKind planner = PlannerKind::CorMcts;
  bool pruning_enabled = true;
  std::uint64_t seed = 0;
  MissionStatus outcome = MissionStatus::InProgress;
  int ticks = 0;
  std::vector<double> planner_ms;
};

struct BatchReport {
  std::vector<BatchCell> cells;

  nlohmann::json to_json() const;  // aggregates + per-run outcome matrix
  std::string runtimes_csv() const;  // scenario,planner,pruning,seed,call,planner_ms
};

BatchReport run_batch(const std::vector<std::string>& scenario_paths,
                      const std::vector<PlannerKind>& planners,
                      const std::vector<std::uint64_t>& seeds, const RunOverrides& overrides);

double median(std::vector<double> values);

}  // namespace cormcts
