#pragma once

#include <vector>

#include "cormcts/dynamics.hpp"
#include "cormcts/utility.hpp"
#include "cormcts/world.hpp"

namespace cormcts {

struct NoFeasibleAction : std::runtime_error {
  explicit NoFeasibleAction(const std::string& what) : std::runtime_error(what) {}
};

struct FixedHorizonConfig {
  double horizon_s = 5.0;
};

// One evaluated candidate of the fixed-horizon planner.
struct FixedHorizonRow {
  ManeuverAction action = ManeuverAction::KeepLaneSameSpeed;
  double v = 0.0;
  ProfitBreakdown breakdown;
  WorldState end_world;
};

struct FixedHorizonPlan {
  ManeuverAction action = ManeuverAction::KeepLaneSameSpeed;
  std::vector<FixedHorizonRow> table;  // feasible actions in enum order
};

// The comparison planner: rolls each feasible action out for the whole
// horizon as a single sustained maneuver and picks the best endpoint profit.
// Only collisions abort a rollout early; route outcomes are judged purely at
// the horizon endpoint, which is exactly the myopia under study. Ties go to
// the earlier action in enum order. Deterministic.
FixedHorizonPlan plan_fixed(const WorldState& world, const RoadNetwork& net,
                            const FixedHorizonConfig& config, const UtilityWeights& weights,
                            const DynamicsParams& dynamics, VehicleModel model);

}  // namespace cormcts
