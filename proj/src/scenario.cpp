#include "cormcts/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

namespace cormcts {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void expect_object(const json& v, const std::string& path) {
  if (!v.is_object()) throw ValidationError(path, "expected an object");
}

void expect_array(const json& v, const std::string& path) {
  if (!v.is_array()) throw ValidationError(path, "expected an array");
}

// Strict schema: any key outside the allowed set is rejected with its path.
void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) throw ValidationError(join(path, it.key()), "unknown key");
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(join(path, key), "missing required key");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ValidationError(path, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ValidationError(path, "expected an integer");
  return v.get<int>();
}

std::uint64_t as_u64(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ValidationError(path, "expected a non-negative integer");
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ValidationError(path, "expected a boolean");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ValidationError(path, "expected a string");
  return v.get<std::string>();
}

Lane parse_lane(const json& j, const std::string& path) {
  expect_object(j, path);
  check_keys(j, path,
             {"id", "length_m", "speed_limit_kmh", "left", "right", "ends_at_m",
              "exit_window_m", "is_exit"});
  Lane lane;
  lane.id = as_int(require(j, path, "id"), join(path, "id"));
  lane.length_m = as_number(require(j, path, "length_m"), join(path, "length_m"));
  lane.speed_limit_mps =
      kmh_to_mps(as_number(require(j, path, "speed_limit_kmh"), join(path, "speed_limit_kmh")));
  if (j.contains("left")) lane.left = as_int(j["left"], join(path, "left"));
  if (j.contains("right")) lane.right = as_int(j["right"], join(path, "right"));
  if (j.contains("ends_at_m"))
    lane.ends_at_m = as_number(j["ends_at_m"], join(path, "ends_at_m"));
  if (j.contains("exit_window_m")) {
    const json& w = j["exit_window_m"];
    std::string wpath = join(path, "exit_window_m");
    expect_array(w, wpath);
    if (w.size() != 2) throw ValidationError(wpath, "expected [start_m, end_m]");
    lane.exit_window_m = {as_number(w[0], index(wpath, 0)), as_number(w[1], index(wpath, 1))};
  }
  if (j.contains("is_exit")) lane.is_exit = as_bool(j["is_exit"], join(path, "is_exit"));
  return lane;
}

MissionGoal parse_mission(const json& j, const std::string& path) {
  expect_object(j, path);
  check_keys(j, path, {"kind", "target_lane", "must_be_in_lane_by_m"});
  MissionGoal m;
  std::string kind = as_string(require(j, path, "kind"), join(path, "kind"));
  if (kind == "ReachEnd")
    m.kind = MissionKind::ReachEnd;
  else if (kind == "TakeExit")
    m.kind = MissionKind::TakeExit;
  else
    throw ValidationError(join(path, "kind"), "expected ReachEnd or TakeExit");
  m.target_lane = as_int(require(j, path, "target_lane"), join(path, "target_lane"));
  if (j.contains("must_be_in_lane_by_m"))
    m.must_be_in_lane_by_m =
        as_number(j["must_be_in_lane_by_m"], join(path, "must_be_in_lane_by_m"));
  return m;
}

VehicleState parse_vehicle(const json& j, const std::string& path) {
  expect_object(j, path);
  check_keys(j, path, {"id", "lane", "s_m", "speed_kmh"});
  VehicleState v;
  v.id = as_int(require(j, path, "id"), join(path, "id"));
  v.lane = as_int(require(j, path, "lane"), join(path, "lane"));
  v.s_m = as_number(require(j, path, "s_m"), join(path, "s_m"));
  v.speed_mps = kmh_to_mps(as_number(require(j, path, "speed_kmh"), join(path, "speed_kmh")));
  return v;
}

void parse_idm(const json& j, const std::string& path, IDMParams& idm) {
  expect_object(j, path);
  check_keys(j, path,
             {"desired_speed_mps", "max_accel_mps2", "comfort_decel_mps2", "min_gap_m",
              "time_headway_s", "delta"});
  if (j.contains("desired_speed_mps"))
    idm.desired_speed_mps = as_number(j["desired_speed_mps"], join(path, "desired_speed_mps"));
  if (j.contains("max_accel_mps2"))
    idm.max_accel_mps2 = as_number(j["max_accel_mps2"], join(path, "max_accel_mps2"));
  if (j.contains("comfort_decel_mps2"))
    idm.comfort_decel_mps2 = as_number(j["comfort_decel_mps2"], join(path, "comfort_decel_mps2"));
  if (j.contains("min_gap_m")) idm.min_gap_m = as_number(j["min_gap_m"], join(path, "min_gap_m"));
  if (j.contains("time_headway_s"))
    idm.time_headway_s = as_number(j["time_headway_s"], join(path, "time_headway_s"));
  if (j.contains("delta")) idm.delta = as_number(j["delta"], join(path, "delta"));
}

void parse_dynamics(const json& j, const std::string& path, DynamicsParams& dp) {
  expect_object(j, path);
  check_keys(j, path,
             {"accel_mps2", "decel_mps2", "stop_decel_mps2", "lane_change_duration_s",
              "action_duration_s", "idm"});
  if (j.contains("accel_mps2"))
    dp.accel_mps2 = as_number(j["accel_mps2"], join(path, "accel_mps2"));
  if (j.contains("decel_mps2"))
    dp.decel_mps2 = as_number(j["decel_mps2"], join(path, "decel_mps2"));
  if (j.contains("stop_decel_mps2"))
    dp.stop_decel_mps2 = as_number(j["stop_decel_mps2"], join(path, "stop_decel_mps2"));
  if (j.contains("lane_change_duration_s"))
    dp.lane_change_duration_s =
        as_number(j["lane_change_duration_s"], join(path, "lane_change_duration_s"));
  if (j.contains("action_duration_s"))
    dp.action_duration_s = as_number(j["action_duration_s"], join(path, "action_duration_s"));
  if (j.contains("idm")) parse_idm(j["idm"], join(path, "idm"), dp.idm);
}

void parse_weights(const json& j, const std::string& path, UtilityWeights& w) {
  expect_object(j, path);
  check_keys(j, path, {"safety", "legality", "mission", "efficiency", "comfort"});
  if (j.contains("safety")) w.safety = as_number(j["safety"], join(path, "safety"));
  if (j.contains("legality")) w.legality = as_number(j["legality"], join(path, "legality"));
  if (j.contains("mission")) w.mission = as_number(j["mission"], join(path, "mission"));
  if (j.contains("efficiency")) w.efficiency = as_number(j["efficiency"], join(path, "efficiency"));
  if (j.contains("comfort")) w.comfort = as_number(j["comfort"], join(path, "comfort"));
}

void parse_search(const json& j, const std::string& path, SearchConfig& sc) {
  expect_object(j, path);
  check_keys(j, path,
             {"exploration_c", "gamma", "lane_keep_bias_after_lane_change", "pruning_enabled",
              "decision_rule", "max_wall_time_s", "max_nodes"});
  if (j.contains("exploration_c"))
    sc.exploration_c = as_number(j["exploration_c"], join(path, "exploration_c"));
  if (j.contains("gamma")) sc.gamma = as_number(j["gamma"], join(path, "gamma"));
  if (j.contains("lane_keep_bias_after_lane_change"))
    sc.lane_keep_bias_after_lane_change = as_number(
        j["lane_keep_bias_after_lane_change"], join(path, "lane_keep_bias_after_lane_change"));
  if (j.contains("pruning_enabled"))
    sc.pruning_enabled = as_bool(j["pruning_enabled"], join(path, "pruning_enabled"));
  if (j.contains("decision_rule")) {
    std::string rule = as_string(j["decision_rule"], join(path, "decision_rule"));
    if (rule == "accumulated")
      sc.decision_rule = DecisionRule::Accumulated;
    else if (rule == "mean")
      sc.decision_rule = DecisionRule::Mean;
    else
      throw ValidationError(join(path, "decision_rule"), "expected accumulated or mean");
  }
  if (j.contains("max_wall_time_s"))
    sc.budget.max_wall_time_s = as_number(j["max_wall_time_s"], join(path, "max_wall_time_s"));
  if (j.contains("max_nodes")) sc.budget.max_nodes = as_int(j["max_nodes"], join(path, "max_nodes"));
}

void validate_vehicle(const VehicleState& v, const RoadNetwork& net, const std::string& path) {
  const Lane* lane = net.find_lane(v.lane);
  if (!lane) throw ValidationError(join(path, "lane"), "references an unknown lane");
  if (v.s_m < 0.0 || v.s_m > lane->length_m)
    throw ValidationError(join(path, "s_m"), "outside the lane extent");
  if (v.speed_mps < 0.0) throw ValidationError(join(path, "speed_kmh"), "must be >= 0");
  if ((v.lateral_progress > 0.0) != v.lane_change_target.has_value())
    throw ValidationError(join(path, "lateral_progress"),
                          "lane_change_target must be present exactly while in a change");
}

}  // namespace

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return parse_scenario(doc, std::filesystem::path(path).stem().string());
}

ScenarioConfig parse_scenario(const nlohmann::json& doc, const std::string& id) {
  expect_object(doc, "(root)");
  check_keys(doc, "",
             {"network", "mission", "initial", "other_vehicle_model", "duration_s",
              "replan_period_s", "rng_seed", "search", "dynamics", "utility_weights"});
  ScenarioConfig config;
  config.id = id;

  const json& network = require(doc, "", "network");
  expect_array(network, "network");
  for (std::size_t i = 0; i < network.size(); ++i)
    config.network.lanes.push_back(parse_lane(network[i], index("network", i)));
  config.network.mission = parse_mission(require(doc, "", "mission"), "mission");

  const json& initial = require(doc, "", "initial");
  expect_object(initial, "initial");
  check_keys(initial, "initial", {"ego", "others"});
  config.initial.ego = parse_vehicle(require(initial, "initial", "ego"), "initial.ego");
  const json& others = require(initial, "initial", "others");
  expect_array(others, "initial.others");
  for (std::size_t i = 0; i < others.size(); ++i)
    config.initial.others.push_back(
        parse_vehicle(others[i], index("initial.others", i)));

  std::string model =
      as_string(require(doc, "", "other_vehicle_model"), "other_vehicle_model");
  if (model == "ConstantSpeed")
    config.other_vehicle_model = VehicleModel::ConstantSpeed;
  else if (model == "IDM")
    config.other_vehicle_model = VehicleModel::IDM;
  else
    throw ValidationError("other_vehicle_model", "expected ConstantSpeed or IDM");

  config.duration_s = as_number(require(doc, "", "duration_s"), "duration_s");
  config.replan_period_s = as_number(require(doc, "", "replan_period_s"), "replan_period_s");
  config.rng_seed = as_u64(require(doc, "", "rng_seed"), "rng_seed");
  if (doc.contains("search")) parse_search(doc["search"], "search", config.search);
  if (doc.contains("dynamics")) parse_dynamics(doc["dynamics"], "dynamics", config.dynamics);
  if (doc.contains("utility_weights"))
    parse_weights(doc["utility_weights"], "utility_weights", config.weights);
  config.search.rng_seed = config.rng_seed;

  validate_config(config);
  return config;
}

nlohmann::json serialize_scenario(const ScenarioConfig& config) {
  json doc;
  json lanes = json::array();
  for (const Lane& lane : config.network.lanes) {
    json l;
    l["id"] = lane.id;
    l["length_m"] = lane.length_m;
    l["speed_limit_kmh"] = mps_to_kmh(lane.speed_limit_mps);
    if (lane.left) l["left"] = *lane.left;
    if (lane.right) l["right"] = *lane.right;
    if (lane.ends_at_m) l["ends_at_m"] = *lane.ends_at_m;
    if (lane.exit_window_m)
      l["exit_window_m"] = json::array({lane.exit_window_m->first, lane.exit_window_m->second});
    if (lane.is_exit) l["is_exit"] = true;
    lanes.push_back(std::move(l));
  }
  doc["network"] = std::move(lanes);

  json mission;
  mission["kind"] = to_string(config.network.mission.kind);
  mission["target_lane"] = config.network.mission.target_lane;
  if (config.network.mission.must_be_in_lane_by_m)
    mission["must_be_in_lane_by_m"] = *config.network.mission.must_be_in_lane_by_m;
  doc["mission"] = std::move(mission);

  auto vehicle = [](const VehicleState& v) {
    json j;
    j["id"] = v.id;
    j["lane"] = v.lane;
    j["s_m"] = v.s_m;
    j["speed_kmh"] = mps_to_kmh(v.speed_mps);
    return j;
  };
  json initial;
  initial["ego"] = vehicle(config.initial.ego);
  json others = json::array();
  for (const VehicleState& v : config.initial.others) others.push_back(vehicle(v));
  initial["others"] = std::move(others);
  doc["initial"] = std::move(initial);

  doc["other_vehicle_model"] = to_string(config.other_vehicle_model);
  doc["duration_s"] = config.duration_s;
  doc["replan_period_s"] = config.replan_period_s;
  doc["rng_seed"] = config.rng_seed;

  json search;
  search["exploration_c"] = config.search.exploration_c;
  search["gamma"] = config.search.gamma;
  search["lane_keep_bias_after_lane_change"] = config.search.lane_keep_bias_after_lane_change;
  search["pruning_enabled"] = config.search.pruning_enabled;
  search["decision_rule"] = to_string(config.search.decision_rule);
  search["max_wall_time_s"] = config.search.budget.max_wall_time_s;
  search["max_nodes"] = config.search.budget.max_nodes;
  doc["search"] = std::move(search);

  json dynamics;
  dynamics["accel_mps2"] = config.dynamics.accel_mps2;
  dynamics["decel_mps2"] = config.dynamics.decel_mps2;
  dynamics["stop_decel_mps2"] = config.dynamics.stop_decel_mps2;
  dynamics["lane_change_duration_s"] = config.dynamics.lane_change_duration_s;
  dynamics["action_duration_s"] = config.dynamics.action_duration_s;
  json idm;
  idm["desired_speed_mps"] = config.dynamics.idm.desired_speed_mps;
  idm["max_accel_mps2"] = config.dynamics.idm.max_accel_mps2;
  idm["comfort_decel_mps2"] = config.dynamics.idm.comfort_decel_mps2;
  idm["min_gap_m"] = config.dynamics.idm.min_gap_m;
  idm["time_headway_s"] = config.dynamics.idm.time_headway_s;
  idm["delta"] = config.dynamics.idm.delta;
  dynamics["idm"] = std::move(idm);
  doc["dynamics"] = std::move(dynamics);

  json weights;
  weights["safety"] = config.weights.safety;
  weights["legality"] = config.weights.legality;
  weights["mission"] = config.weights.mission;
  weights["efficiency"] = config.weights.efficiency;
  weights["comfort"] = config.weights.comfort;
  doc["utility_weights"] = std::move(weights);
  return doc;
}

void validate_config(const ScenarioConfig& config) {
  validate_network(config.network);

  if (config.duration_s <= 0.0) throw ValidationError("duration_s", "must be > 0");
  if (config.replan_period_s <= 0.0) throw ValidationError("replan_period_s", "must be > 0");

  validate_vehicle(config.initial.ego, config.network, "initial.ego");
  for (std::size_t i = 0; i < config.initial.others.size(); ++i) {
    const VehicleState& v = config.initial.others[i];
    validate_vehicle(v, config.network, index("initial.others", i));
    if (v.id == config.initial.ego.id)
      throw ValidationError(join(index("initial.others", i), "id"),
                            "duplicates the ego vehicle id");
    for (std::size_t k = 0; k < i; ++k)
      if (config.initial.others[k].id == v.id)
        throw ValidationError(join(index("initial.others", i), "id"), "duplicate vehicle id");
  }
  if (config.initial.time_s < 0.0) throw ValidationError("initial.time_s", "must be >= 0");

  const SearchConfig& sc = config.search;
  if (sc.exploration_c < 0.0) throw ValidationError("search.exploration_c", "must be >= 0");
  if (sc.gamma <= 0.0 || sc.gamma > 1.0)
    throw ValidationError("search.gamma", "must lie in (0, 1]");
  if (sc.lane_keep_bias_after_lane_change < 0.0 || sc.lane_keep_bias_after_lane_change > 1.0)
    throw ValidationError("search.lane_keep_bias_after_lane_change", "must lie in [0, 1]");
  if (sc.budget.max_nodes < 2) throw ValidationError("search.max_nodes", "must be >= 2");
  if (sc.budget.max_wall_time_s <= 0.0)
    throw ValidationError("search.max_wall_time_s", "must be > 0");

  const DynamicsParams& dp = config.dynamics;
  if (dp.accel_mps2 <= 0.0) throw ValidationError("dynamics.accel_mps2", "must be > 0");
  if (dp.decel_mps2 <= 0.0) throw ValidationError("dynamics.decel_mps2", "must be > 0");
  if (dp.stop_decel_mps2 <= 0.0) throw ValidationError("dynamics.stop_decel_mps2", "must be > 0");
  if (dp.lane_change_duration_s <= 0.0)
    throw ValidationError("dynamics.lane_change_duration_s", "must be > 0");
  if (dp.action_duration_s <= 0.0)
    throw ValidationError("dynamics.action_duration_s", "must be > 0");
  if (dp.idm.desired_speed_mps <= 0.0)
    throw ValidationError("dynamics.idm.desired_speed_mps", "must be > 0");
  if (dp.idm.max_accel_mps2 <= 0.0)
    throw ValidationError("dynamics.idm.max_accel_mps2", "must be > 0");
  if (dp.idm.comfort_decel_mps2 <= 0.0)
    throw ValidationError("dynamics.idm.comfort_decel_mps2", "must be > 0");
  if (dp.idm.min_gap_m <= 0.0) throw ValidationError("dynamics.idm.min_gap_m", "must be > 0");
  if (dp.idm.time_headway_s <= 0.0)
    throw ValidationError("dynamics.idm.time_headway_s", "must be > 0");
  if (dp.idm.delta < 1.0) throw ValidationError("dynamics.idm.delta", "must be >= 1");

  const UtilityWeights& w = config.weights;
  double sum = w.safety + w.legality + w.mission + w.efficiency + w.comfort;
  for (double x : {w.safety, w.legality, w.mission, w.efficiency, w.comfort})
    if (x < 0.0) throw ValidationError("weights", "must be >= 0");
  if (std::abs(sum - 1.0) > 1e-9)
    throw ValidationError("weights", "must sum to 1");

  if (config.fixed_horizon.horizon_s <= 0.0)
    throw ValidationError("fixed_horizon.horizon_s", "must be > 0");
}

const char* to_string(VehicleModel m) {
  return m == VehicleModel::ConstantSpeed ? "ConstantSpeed" : "IDM";
}

const char* to_string(DecisionRule r) {
  return r == DecisionRule::Accumulated ? "accumulated" : "mean";
}

const char* to_string(MissionKind k) {
  return k == MissionKind::ReachEnd ? "ReachEnd" : "TakeExit";
}

}  // namespace cormcts
