#include "cormcts/utility.hpp"

#include <algorithm>
#include <cmath>

namespace cormcts {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

double safety_score(const WorldState& world) {
  auto leader = leader_of_ego(world);
  if (!leader) return 1.0;
  if (world.ego.speed_mps <= 0.0) return 1.0;  // standing still, no closing risk
  double time_gap = (leader->s_m - world.ego.s_m) / world.ego.speed_mps;
  return clamp01(time_gap / 2.0);
}

double legality_score(const WorldState& world, const RoadNetwork& net) {
  const Lane& lane = net.lane(world.ego.lane);
  double limit = lane.speed_limit_mps;
  double over = (world.ego.speed_mps - limit) / limit;
  return 1.0 - clamp01(over);
}

double mission_score(const WorldState& world, const RoadNetwork& net) {
  if (on_route(world, net)) return 1.0;
  auto anchor = compliance_anchor(world, net);
  if (!anchor) return 1.0;  // nothing ahead forces a change yet
  double distance = *anchor - world.ego.s_m;
  double v = world.ego.speed_mps;
  if (v <= 0.0) return distance > 0.0 ? 1.0 : 0.0;
  // Full credit with at least five seconds of travel in hand, fading to none
  // at three; past that the change can no longer be completed comfortably.
  return clamp01((distance - 3.0 * v) / (2.0 * v));
}

double efficiency_score(const WorldState& world, const RoadNetwork& net) {
  const Lane& lane = net.lane(world.ego.lane);
  return clamp01(world.ego.speed_mps / lane.speed_limit_mps);
}

double comfort_score(ManeuverAction action, const DynamicsParams& p) {
  double penalty = 0.0;
  if (is_lane_change(action)) penalty += 0.5;
  penalty += clamp01(std::abs(commanded_accel(action, p)) / p.stop_decel_mps2);
  return clamp01(1.0 - penalty);
}

ProfitBreakdown evaluate_profit(const WorldState& world, const RoadNetwork& net,
                                ManeuverAction action_taken, const UtilityWeights& w,
                                const DynamicsParams& p) {
  ProfitBreakdown b;
  b.failed = mission_status(world, net) == MissionStatus::Failure;
  if (b.failed) return b;  // hard zero: no partial credit out of a failed world
  b.safety = safety_score(world);
  b.legality = legality_score(world, net);
  b.mission = mission_score(world, net);
  b.efficiency = efficiency_score(world, net);
  b.comfort = comfort_score(action_taken, p);
  b.total = w.safety * b.safety + w.legality * b.legality + w.mission * b.mission +
            w.efficiency * b.efficiency + w.comfort * b.comfort;
  return b;
}

}  // namespace cormcts
