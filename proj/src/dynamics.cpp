#include "cormcts/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace cormcts {

namespace {

constexpr double kEps = 1e-9;
constexpr double kProgressDone = 1.0 - 1e-9;

// Advances (s, v) by dt under constant commanded acceleration, holding the
// speed at zero once braking exhausts it.
void integrate_longitudinal(double& s, double& v, double a, double dt) {
  if (a < 0.0 && v + a * dt < 0.0) {
    double t_stop = v / -a;
    s += v * t_stop + 0.5 * a * t_stop * t_stop;
    v = 0.0;
    return;
  }
  s += v * dt + 0.5 * a * dt * dt;
  v += a * dt;
}

// Side of a lane change already in flight, derived from the stored target.
std::optional<ManeuverAction> in_flight_direction(const RoadNetwork& net,
                                                  const VehicleState& ego) {
  if (!ego.in_lane_change() || !ego.lane_change_target) return std::nullopt;
  const Lane& current = net.lane(ego.lane);
  if (current.left == *ego.lane_change_target) return ManeuverAction::ChangeLaneLeft;
  if (current.right == *ego.lane_change_target) return ManeuverAction::ChangeLaneRight;
  return std::nullopt;
}

}  // namespace

const char* to_string(ManeuverAction a) {
  switch (a) {
    case ManeuverAction::ChangeLaneLeft: return "ChangeLaneLeft";
    case ManeuverAction::ChangeLaneRight: return "ChangeLaneRight";
    case ManeuverAction::KeepLaneAccelerate: return "KeepLaneAccelerate";
    case ManeuverAction::KeepLaneSameSpeed: return "KeepLaneSameSpeed";
    case ManeuverAction::KeepLaneDecelerate: return "KeepLaneDecelerate";
    case ManeuverAction::Stop: return "Stop";
  }
  return "?";
}

std::optional<ManeuverAction> maneuver_from_string(const std::string& name) {
  for (ManeuverAction a : kAllActions)
    if (name == to_string(a)) return a;
  return std::nullopt;
}

double commanded_accel(ManeuverAction a, const DynamicsParams& p) {
  switch (a) {
    case ManeuverAction::KeepLaneAccelerate: return p.accel_mps2;
    case ManeuverAction::KeepLaneDecelerate: return -p.decel_mps2;
    case ManeuverAction::Stop: return -p.stop_decel_mps2;
    default: return 0.0;
  }
}

bool action_feasible(const RoadNetwork& net, const WorldState& world, ManeuverAction a) {
  if (!is_lane_change(a)) return true;
  const VehicleState& ego = world.ego;
  if (ego.in_lane_change()) {
    auto direction = in_flight_direction(net, ego);
    return direction && *direction == a;  // opposite of an in-flight change is out
  }
  const Lane& current = net.lane(ego.lane);
  std::optional<int> neighbor =
      a == ManeuverAction::ChangeLaneLeft ? current.left : current.right;
  if (!neighbor) return false;
  const Lane& dest = net.lane(*neighbor);
  if (dest.is_exit) {
    if (!dest.exit_window_m) return false;
    if (ego.s_m < dest.exit_window_m->first - kEps ||
        ego.s_m > dest.exit_window_m->second + kEps)
      return false;  // an exit ramp can only be entered inside its window
  }
  return true;
}

VehicleState apply_ego_action(const RoadNetwork& net, const WorldState& world,
                              ManeuverAction action, const DynamicsParams& p, double dt) {
  if (!action_feasible(net, world, action))
    throw InfeasibleAction(std::string(to_string(action)) + " from lane " +
                           std::to_string(world.ego.lane));
  VehicleState ego = world.ego;
  double rate = 1.0 / p.lane_change_duration_s;

  if (is_lane_change(action)) {
    if (!ego.in_lane_change()) {
      const Lane& current = net.lane(ego.lane);
      ego.lane_change_target =
          action == ManeuverAction::ChangeLaneLeft ? current.left : current.right;
    }
    double remaining_progress = 1.0 - ego.lateral_progress;
    double t_complete = remaining_progress * p.lane_change_duration_s;
    if (dt >= t_complete - kEps) {
      // Completes within this application; the rest of the time continues
      // straight in the new lane (no second change is initiated).
      ego.lane = *ego.lane_change_target;
      ego.lane_change_target.reset();
      ego.lateral_progress = 0.0;
    } else {
      ego.lateral_progress += dt * rate;
      if (ego.lateral_progress >= kProgressDone) {
        ego.lane = *ego.lane_change_target;
        ego.lane_change_target.reset();
        ego.lateral_progress = 0.0;
      }
    }
    ego.accel_mps2 = 0.0;
    integrate_longitudinal(ego.s_m, ego.speed_mps, 0.0, dt);
  } else {
    if (ego.in_lane_change()) {
      // A keep-lane command aborts the change; progress drains at the same rate.
      ego.lateral_progress = std::max(0.0, ego.lateral_progress - dt * rate);
      if (ego.lateral_progress <= 0.0) ego.lane_change_target.reset();
    }
    double a = commanded_accel(action, p);
    ego.accel_mps2 = a;
    integrate_longitudinal(ego.s_m, ego.speed_mps, a, dt);
  }

  ego.s_m = std::clamp(ego.s_m, 0.0, net.lane(ego.lane).length_m);
  return ego;
}

double idm_accel(double speed, std::optional<double> gap_m, std::optional<double> leader_speed,
                 const IDMParams& p) {
  double free_term = std::pow(speed / p.desired_speed_mps, p.delta);
  double interaction = 0.0;
  if (gap_m && *gap_m > kEps) {
    double dv = speed - leader_speed.value_or(speed);
    double s_star = p.min_gap_m + speed * p.time_headway_s +
                    speed * dv / (2.0 * std::sqrt(p.max_accel_mps2 * p.comfort_decel_mps2));
    s_star = std::max(0.0, s_star);
    interaction = (s_star / *gap_m) * (s_star / *gap_m);
  }
  return p.max_accel_mps2 * (1.0 - free_term - interaction);
}

void step_others(const RoadNetwork& net, WorldState& world, VehicleModel model,
                 const IDMParams& idm, double dt) {
  // Accelerations are computed against the pre-step snapshot so the update
  // order of the vehicles cannot matter.
  std::vector<double> accels(world.others.size(), 0.0);
  if (model == VehicleModel::IDM) {
    for (std::size_t i = 0; i < world.others.size(); ++i) {
      const VehicleState& v = world.others[i];
      const VehicleState* leader = nullptr;
      for (const VehicleState& other : world.others) {
        if (other.id == v.id || other.lane != v.lane || other.s_m < v.s_m) continue;
        if (!leader || other.s_m < leader->s_m) leader = &other;
      }
      bool ego_ahead = false;
      for (int lane_id : occupied_lanes(world.ego))
        if (lane_id == v.lane && world.ego.s_m >= v.s_m) ego_ahead = true;
      std::optional<double> gap;
      std::optional<double> leader_speed;
      if (leader) {
        gap = leader->s_m - v.s_m;
        leader_speed = leader->speed_mps;
      }
      if (ego_ahead && (!gap || world.ego.s_m - v.s_m < *gap)) {
        gap = world.ego.s_m - v.s_m;
        leader_speed = world.ego.speed_mps;
      }
      accels[i] = idm_accel(v.speed_mps, gap, leader_speed, idm);
    }
  }
  for (std::size_t i = 0; i < world.others.size(); ++i) {
    VehicleState& v = world.others[i];
    v.accel_mps2 = accels[i];
    integrate_longitudinal(v.s_m, v.speed_mps, accels[i], dt);
  }
  // Vehicles leaving the road are gone for good (open boundary).
  std::erase_if(world.others, [&](const VehicleState& v) {
    return v.s_m >= net.lane(v.lane).length_m - kEps;
  });
}

WorldState advance(const RoadNetwork& net, const WorldState& world, ManeuverAction action,
                   const DynamicsParams& p, VehicleModel model, double dt,
                   bool latch_route_faults) {
  WorldState w = world;
  if (w.fault != Fault::None) return w;

  ManeuverAction effective = action;
  double remaining = dt;
  while (remaining > kEps) {
    double h = std::min(kSubstepS, remaining);
    remaining -= h;

    bool was_changing = w.ego.in_lane_change();
    int lane_before = w.ego.lane;
    w.ego = apply_ego_action(net, w, effective, p, h);
    if (is_lane_change(effective) && !w.ego.in_lane_change() &&
        (was_changing || w.ego.lane != lane_before)) {
      effective = ManeuverAction::KeepLaneSameSpeed;  // change done; hold the lane
    }
    step_others(net, w, model, p.idm, h);
    w.time_s += h;

    if (any_collision(w)) {
      w.fault = Fault::Collision;
      break;
    }
    if (!latch_route_faults) continue;

    bool route_fault = false;
    for (int lane_id : occupied_lanes(w.ego)) {
      const Lane& l = net.lane(lane_id);
      if (l.ends_at_m && w.ego.s_m > *l.ends_at_m + kEps) {
        w.fault = Fault::EndedLane;
        route_fault = true;
      }
    }
    if (!route_fault && net.mission.must_be_in_lane_by_m &&
        w.ego.s_m > *net.mission.must_be_in_lane_by_m + kEps &&
        w.ego.lane != net.mission.target_lane) {
      w.fault = Fault::MissedAnchor;
      route_fault = true;
    }
    if (!route_fault) {
      if (w.ego.speed_mps < net.mission.stuck_speed_mps) {
        if (!w.slow_since_s) w.slow_since_s = w.time_s;
        if (w.time_s - *w.slow_since_s >= net.mission.stuck_timeout_s - kEps) {
          w.fault = Fault::Stuck;
          route_fault = true;
        }
      } else {
        w.slow_since_s.reset();
      }
    }
    if (route_fault) break;
  }
  return w;
}

}  // namespace cormcts
