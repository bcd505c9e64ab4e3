#pragma once

#include "cormcts/dynamics.hpp"
#include "cormcts/world.hpp"

namespace cormcts {

struct UtilityWeights {
  double safety = 0.30;
  double legality = 0.15;
  double mission = 0.30;
  double efficiency = 0.15;
  double comfort = 0.10;
};

struct ProfitBreakdown {
  double safety = 0.0;
  double legality = 0.0;
  double mission = 0.0;
  double efficiency = 0.0;
  double comfort = 0.0;
  double total = 0.0;
  bool failed = false;  // hard zero applied
};

// Time gap to the leader, scaled so that >= 2 s scores 1. Clear road or a
// standing ego scores 1.
double safety_score(const WorldState& world);

// 1 while at or under the current lane's limit, reaching 0 at twice the limit.
double legality_score(const WorldState& world, const RoadNetwork& net);

// 1 on the target lane; off it, decays from 1 to 0 as the remaining distance
// to the compliance anchor shrinks from 5x to 3x the current speed (a
// standing vehicle scores 1 while any distance remains).
double mission_score(const WorldState& world, const RoadNetwork& net);

// Fraction of the current lane's limit actually driven.
double efficiency_score(const WorldState& world, const RoadNetwork& net);

// 1 minus 0.5 for a lane-change maneuver minus |commanded accel| relative to
// the emergency-stop deceleration, clamped to [0, 1].
double comfort_score(ManeuverAction action_taken, const DynamicsParams& p);

// Weighted sum of the five sub-scores; any world whose mission_status is
// Failure scores a hard 0 regardless of the sub-scores.
ProfitBreakdown evaluate_profit(const WorldState& world, const RoadNetwork& net,
                                ManeuverAction action_taken, const UtilityWeights& w,
                                const DynamicsParams& p);

}  // namespace cormcts
