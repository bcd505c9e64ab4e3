#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "cormcts/baseline.hpp"
#include "cormcts/dynamics.hpp"
#include "cormcts/mcts.hpp"
#include "cormcts/utility.hpp"
#include "cormcts/world.hpp"

namespace cormcts {

struct ScenarioConfig {
  std::string id;  // file stem; not part of the schema
  RoadNetwork network;
  WorldState initial;
  VehicleModel other_vehicle_model = VehicleModel::ConstantSpeed;
  double duration_s = 0.0;
  double replan_period_s = 0.0;
  std::uint64_t rng_seed = 0;
  DynamicsParams dynamics;
  UtilityWeights weights;
  SearchConfig search;
  FixedHorizonConfig fixed_horizon;
};

// Parses and fully validates a scenario JSON document. Speeds appear in the
// file as km/h (speed_kmh / speed_limit_kmh) and are converted to SI on load.
// Any unknown key at any level raises ValidationError naming the field path.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const nlohmann::json& doc, const std::string& id);

// Inverse of load_scenario: emits a document that parses back to an equal
// config (numeric fields round-trip within 1e-12).
nlohmann::json serialize_scenario(const ScenarioConfig& config);

void validate_config(const ScenarioConfig& config);

const char* to_string(VehicleModel m);
const char* to_string(DecisionRule r);
const char* to_string(MissionKind k);

}  // namespace cormcts
