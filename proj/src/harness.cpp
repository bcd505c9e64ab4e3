#include "cormcts/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace cormcts {

namespace {

using nlohmann::json;

json vehicle_json(const VehicleState& v) {
  json j;
  j["id"] = v.id;
  j["lane"] = v.lane;
  j["s_m"] = v.s_m;
  j["speed_mps"] = v.speed_mps;
  j["accel_mps2"] = v.accel_mps2;
  j["lateral_progress"] = v.lateral_progress;
  if (v.lane_change_target) j["lane_change_target"] = *v.lane_change_target;
  return j;
}

json world_json(const WorldState& w) {
  json j;
  j["time_s"] = w.time_s;
  j["ego"] = vehicle_json(w.ego);
  json others = json::array();
  for (const VehicleState& o : w.others) others.push_back(vehicle_json(o));
  j["others"] = std::move(others);
  j["fault"] = to_string(w.fault);
  if (w.slow_since_s) j["slow_since_s"] = *w.slow_since_s;
  return j;
}

json breakdown_json(const ProfitBreakdown& b) {
  json j;
  j["safety"] = b.safety;
  j["legality"] = b.legality;
  j["mission"] = b.mission;
  j["efficiency"] = b.efficiency;
  j["comfort"] = b.comfort;
  j["total"] = b.total;
  j["failed"] = b.failed;
  return j;
}

json stats_json(const SearchStats& s) {
  json j;
  j["iterations"] = s.iterations;
  j["nodes"] = s.nodes;
  j["wasted_draws"] = s.wasted_draws;
  j["pruned_draws"] = s.pruned_draws;
  j["zero_value_nodes"] = s.zero_value_nodes;
  j["max_depth"] = s.max_depth;
  j["elapsed_s"] = s.elapsed_s;
  j["exhausted"] = s.exhausted;
  return j;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  double pos = q * static_cast<double>(values.size() - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
  double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

}  // namespace

const char* to_string(PlannerKind p) {
  return p == PlannerKind::CorMcts ? "cormcts" : "fixed";
}

std::optional<PlannerKind> planner_from_string(const std::string& name) {
  if (name == "cormcts") return PlannerKind::CorMcts;
  if (name == "fixed") return PlannerKind::Fixed;
  return std::nullopt;
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

RunTrace run_scenario(const ScenarioConfig& config, PlannerKind planner,
                      const RunOverrides& overrides) {
  using clock = std::chrono::steady_clock;

  RunTrace trace;
  trace.scenario = config.id;
  trace.planner = planner;
  trace.deterministic = overrides.deterministic;
  std::uint64_t base_seed = overrides.seed.value_or(config.rng_seed);
  trace.seed = base_seed;

  SearchConfig search = config.search;
  if (overrides.budget_ms) search.budget.max_wall_time_s = *overrides.budget_ms / 1000.0;
  if (overrides.max_nodes) search.budget.max_nodes = *overrides.max_nodes;
  if (overrides.pruning_enabled) search.pruning_enabled = *overrides.pruning_enabled;
  if (overrides.decision_rule) search.decision_rule = *overrides.decision_rule;
  if (overrides.deterministic) search.budget.wall_clock_enabled = false;

  WorldState world = config.initial;
  int tick = 0;
  while (mission_status(world, config.network) == MissionStatus::InProgress &&
         world.time_s < config.duration_s - 1e-9) {
    TickRecord rec;
    rec.tick = tick;
    rec.time_s = world.time_s;

    clock::time_point t0 = clock::now();
    if (planner == PlannerKind::CorMcts) {
      SearchConfig tick_search = search;
      // Every replan gets its own decorrelated stream from the base seed.
      tick_search.rng_seed = mix_seed(base_seed, static_cast<std::uint64_t>(tick));
      PlanResult result = plan(world, config.network, tick_search, config.weights,
                               config.dynamics, config.other_vehicle_model,
                               /*export_tree=*/true);
      rec.action = result.action;
      rec.search = result.stats;
      rec.tree = std::move(result.tree);
    } else {
      FixedHorizonPlan result = plan_fixed(world, config.network, config.fixed_horizon,
                                           config.weights, config.dynamics,
                                           config.other_vehicle_model);
      rec.action = result.action;
      rec.table = std::move(result.table);
    }
    double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    trace.planner_ms_all.push_back(ms);
    // Recorded times (and measured search time) are zeroed in deterministic
    // mode so two identically seeded runs serialize byte-identically; the
    // real measurements stay available in planner_ms_all.
    rec.planner_ms = overrides.deterministic ? 0.0 : ms;
    if (overrides.deterministic) rec.search.elapsed_s = 0.0;

    world = advance(config.network, world, rec.action, config.dynamics,
                    config.other_vehicle_model, config.replan_period_s,
                    /*latch_route_faults=*/true);
    rec.world = world;
    rec.status = mission_status(world, config.network);
    trace.ticks.push_back(std::move(rec));
    ++tick;
  }

  trace.outcome =
      trace.ticks.empty() ? mission_status(world, config.network) : trace.ticks.back().status;
  std::vector<double> recorded;
  recorded.reserve(trace.ticks.size());
  for (const TickRecord& t : trace.ticks) recorded.push_back(t.planner_ms);
  if (!recorded.empty()) {
    trace.planner_ms_min = *std::min_element(recorded.begin(), recorded.end());
    trace.planner_ms_median = median(recorded);
    trace.planner_ms_max = *std::max_element(recorded.begin(), recorded.end());
  }
  return trace;
}

std::string trace_to_jsonl(const RunTrace& trace, const ScenarioConfig& config) {
  std::string out;

  json header;
  header["type"] = "header";
  header["scenario"] = trace.scenario;
  header["planner"] = to_string(trace.planner);
  header["seed"] = trace.seed;
  header["deterministic"] = trace.deterministic;
  header["config"] = serialize_scenario(config);
  out += header.dump();
  out += '\n';

  for (const TickRecord& t : trace.ticks) {
    json line;
    line["type"] = "tick";
    line["tick"] = t.tick;
    line["time_s"] = t.time_s;
    line["action"] = to_string(t.action);
    line["planner_ms"] = t.planner_ms;
    line["status"] = to_string(t.status);
    line["world"] = world_json(t.world);
    if (trace.planner == PlannerKind::CorMcts) {
      line["search"] = stats_json(t.search);
      json tree = json::array();
      json root_children = json::array();
      for (const NodeRecord& n : t.tree) {
        json nj;
        nj["id"] = n.id;
        nj["parent"] = n.parent;
        if (n.action) nj["action"] = to_string(*n.action);
        nj["depth"] = n.depth;
        nj["v"] = n.v;
        nj["m"] = n.m;
        nj["u"] = n.u;
        nj["terminal"] = n.terminal;
        nj["breakdown"] = breakdown_json(evaluate_profit(
            n.world, config.network, n.action.value_or(ManeuverAction::KeepLaneSameSpeed),
            config.weights, config.dynamics));
        tree.push_back(std::move(nj));
        if (n.parent == 0) {
          json c;
          c["action"] = to_string(*n.action);
          c["u"] = n.u;
          c["m"] = n.m;
          root_children.push_back(std::move(c));
        }
      }
      line["root_children"] = std::move(root_children);
      line["tree"] = std::move(tree);
    } else {
      json table = json::array();
      for (const FixedHorizonRow& row : t.table) {
        json rj;
        rj["action"] = to_string(row.action);
        rj["v"] = row.v;
        rj["breakdown"] = breakdown_json(row.breakdown);
        table.push_back(std::move(rj));
      }
      line["table"] = std::move(table);
    }
    out += line.dump();
    out += '\n';
  }

  json result;
  result["type"] = "result";
  result["outcome"] = to_string(trace.outcome);
  result["ticks"] = static_cast<int>(trace.ticks.size());
  json ms;
  ms["min"] = trace.planner_ms_min;
  ms["median"] = trace.planner_ms_median;
  ms["max"] = trace.planner_ms_max;
  result["planner_ms"] = std::move(ms);
  out += result.dump();
  out += '\n';
  return out;
}

void write_trace(const RunTrace& trace, const ScenarioConfig& config, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  out << trace_to_jsonl(trace, config);
}

BatchReport run_batch(const std::vector<std::string>& scenario_paths,
                      const std::vector<PlannerKind>& planners,
                      const std::vector<std::uint64_t>& seeds,
                      const RunOverrides& overrides) {
  BatchReport report;
  for (const std::string& path : scenario_paths) {
    ScenarioConfig config = load_scenario(path);
    for (PlannerKind planner : planners) {
      for (std::uint64_t seed : seeds) {
        RunOverrides per_run = overrides;
        per_run.seed = seed;
        BatchCell cell;
        cell.scenario = config.id;
        cell.planner = planner;
        cell.pruning_enabled =
            overrides.pruning_enabled.value_or(config.search.pruning_enabled);
        cell.seed = seed;
        try {
          RunTrace trace = run_scenario(config, planner, per_run);
          cell.outcome = trace.outcome;
          cell.ticks = static_cast<int>(trace.ticks.size());
          cell.planner_ms = std::move(trace.planner_ms_all);
        } catch (const std::exception&) {
          cell.outcome = MissionStatus::Failure;  // recorded, not fatal
        }
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

nlohmann::json BatchReport::to_json() const {
  json runs = json::array();
  struct Key {
    std::string scenario;
    PlannerKind planner;
    bool pruning;
  };
  std::vector<Key> keys;
  auto key_index = [&](const BatchCell& c) {
    for (std::size_t i = 0; i < keys.size(); ++i)
      if (keys[i].scenario == c.scenario && keys[i].planner == c.planner &&
          keys[i].pruning == c.pruning_enabled)
        return i;
    keys.push_back({c.scenario, c.planner, c.pruning_enabled});
    return keys.size() - 1;
  };
  std::vector<std::vector<const BatchCell*>> groups;
  for (const BatchCell& c : cells) {
    std::size_t i = key_index(c);
    if (groups.size() <= i) groups.resize(i + 1);
    groups[i].push_back(&c);

    json r;
    r["scenario"] = c.scenario;
    r["planner"] = to_string(c.planner);
    r["pruning_enabled"] = c.pruning_enabled;
    r["seed"] = c.seed;
    r["outcome"] = to_string(c.outcome);
    r["ticks"] = c.ticks;
    r["planner_calls"] = static_cast<int>(c.planner_ms.size());
    r["planner_ms_median"] = median(c.planner_ms);
    runs.push_back(std::move(r));
  }

  json aggregates = json::array();
  for (std::size_t i = 0; i < groups.size(); ++i) {
    std::vector<double> ms;
    int successes = 0;
    for (const BatchCell* c : groups[i]) {
      ms.insert(ms.end(), c->planner_ms.begin(), c->planner_ms.end());
      if (c->outcome == MissionStatus::Success) ++successes;
    }
    json a;
    a["scenario"] = keys[i].scenario;
    a["planner"] = to_string(keys[i].planner);
    a["pruning_enabled"] = keys[i].pruning;
    a["runs"] = static_cast<int>(groups[i].size());
    a["successes"] = successes;
    a["success_rate"] =
        groups[i].empty() ? 0.0 : static_cast<double>(successes) / groups[i].size();
    json q;
    q["min"] = quantile(ms, 0.0);
    q["p25"] = quantile(ms, 0.25);
    q["median"] = quantile(ms, 0.5);
    q["p75"] = quantile(ms, 0.75);
    q["max"] = quantile(ms, 1.0);
    a["planner_ms"] = std::move(q);
    aggregates.push_back(std::move(a));
  }

  json doc;
  doc["aggregates"] = std::move(aggregates);
  doc["runs"] = std::move(runs);
  return doc;
}

std::string BatchReport::runtimes_csv() const {
  std::string out = "scenario,planner,pruning,seed,call,planner_ms\n";
  char row[256];
  for (const BatchCell& c : cells) {
    for (std::size_t i = 0; i < c.planner_ms.size(); ++i) {
      std::snprintf(row, sizeof(row), "%s,%s,%d,%llu,%zu,%.6f\n", c.scenario.c_str(),
                    to_string(c.planner), c.pruning_enabled ? 1 : 0,
                    static_cast<unsigned long long>(c.seed), i, c.planner_ms[i]);
      out += row;
    }
  }
  return out;
}

}  // namespace cormcts
