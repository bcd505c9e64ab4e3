#pragma once

#include <array>
#include <optional>

#include "cormcts/world.hpp"

namespace cormcts {

enum class ManeuverAction {
  ChangeLaneLeft,
  ChangeLaneRight,
  KeepLaneAccelerate,
  KeepLaneSameSpeed,
  KeepLaneDecelerate,
  Stop,
};

constexpr std::array<ManeuverAction, 6> kAllActions = {
    ManeuverAction::ChangeLaneLeft,      ManeuverAction::ChangeLaneRight,
    ManeuverAction::KeepLaneAccelerate,  ManeuverAction::KeepLaneSameSpeed,
    ManeuverAction::KeepLaneDecelerate,  ManeuverAction::Stop,
};

const char* to_string(ManeuverAction a);
std::optional<ManeuverAction> maneuver_from_string(const std::string& name);

inline bool is_lane_change(ManeuverAction a) {
  return a == ManeuverAction::ChangeLaneLeft || a == ManeuverAction::ChangeLaneRight;
}

struct IDMParams {
  double desired_speed_mps = 50.0 / 3.6;
  double max_accel_mps2 = 1.5;
  double comfort_decel_mps2 = 2.0;
  double min_gap_m = 2.0;
  double time_headway_s = 1.5;
  double delta = 4.0;
};

struct DynamicsParams {
  double accel_mps2 = 1.5;
  double decel_mps2 = 2.0;
  double stop_decel_mps2 = 4.0;
  double lane_change_duration_s = 3.0;
  double action_duration_s = 2.0;  // maneuver commitment per planning edge
  IDMParams idm;
};

// Signed commanded acceleration for an action (lane changes and
// KeepLaneSameSpeed hold speed).
double commanded_accel(ManeuverAction a, const DynamicsParams& p);

// True when `action` may be applied from `world`: keep-lane actions always
// are; a lane change needs a neighbor on that side (entered only inside its
// exit window when the neighbor is an exit ramp) or an in-flight change in
// the same direction; a change opposite to an in-flight one is infeasible.
bool action_feasible(const RoadNetwork& net, const WorldState& world, ManeuverAction a);

// Advances the ego alone by dt under a sustained action. Speed never drops
// below zero; at most one lane change completes per call, after which the
// remaining time continues straight in the new lane. Throws InfeasibleAction
// when action_feasible is false.
VehicleState apply_ego_action(const RoadNetwork& net, const WorldState& world,
                              ManeuverAction action, const DynamicsParams& p, double dt);

// IDM longitudinal acceleration. gap/leader_speed are empty on open road.
double idm_accel(double speed, std::optional<double> gap_m,
                 std::optional<double> leader_speed, const IDMParams& p);

// Advances all interacting vehicles by dt; vehicles that run off the end of
// their lane despawn.
void step_others(const RoadNetwork& net, WorldState& world, VehicleModel model,
                 const IDMParams& idm, double dt);

constexpr double kSubstepS = 0.1;

// Closed-loop integrator: applies `action` over dt in kSubstepS pieces,
// stepping ego and traffic together and latching faults as they occur.
// Collisions always latch; lane-end, missed-anchor and stuck faults only
// when latch_route_faults is set (fixed-horizon rollouts score those at the
// endpoint instead). A world that is already faulted is returned unchanged.
WorldState advance(const RoadNetwork& net, const WorldState& world, ManeuverAction action,
                   const DynamicsParams& p, VehicleModel model, double dt,
                   bool latch_route_faults);

}  // namespace cormcts
