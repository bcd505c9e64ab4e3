#include "cormcts/world.hpp"

#include <algorithm>
#include <cmath>

namespace cormcts {

namespace {
constexpr double kEps = 1e-9;
constexpr double kArrivalSlackM = 1e-6;
}  // namespace

const Lane* RoadNetwork::find_lane(int id) const {
  for (const Lane& l : lanes)
    if (l.id == id) return &l;
  return nullptr;
}

const Lane& RoadNetwork::lane(int id) const {
  const Lane* l = find_lane(id);
  if (!l) throw ValidationError("network", "unknown lane id " + std::to_string(id));
  return *l;
}

void validate_network(const RoadNetwork& net) {
  if (net.lanes.empty()) throw ValidationError("network", "must contain at least one lane");
  for (std::size_t i = 0; i < net.lanes.size(); ++i) {
    const Lane& l = net.lanes[i];
    const std::string path = "network[" + std::to_string(i) + "]";
    for (std::size_t j = i + 1; j < net.lanes.size(); ++j)
      if (net.lanes[j].id == l.id)
        throw ValidationError(path + ".id", "duplicate lane id " + std::to_string(l.id));
    if (!(l.length_m > 0.0)) throw ValidationError(path + ".length_m", "must be > 0");
    if (!(l.speed_limit_mps > 0.0))
      throw ValidationError(path + ".speed_limit_kmh", "must be > 0");
    if (l.ends_at_m && !(*l.ends_at_m > 0.0 && *l.ends_at_m <= l.length_m + kEps))
      throw ValidationError(path + ".ends_at_m", "must lie in (0, length_m]");
    if (l.exit_window_m) {
      auto [a, b] = *l.exit_window_m;
      if (!(0.0 <= a && a < b && b <= l.length_m + kEps))
        throw ValidationError(path + ".exit_window_m", "must satisfy 0 <= start < end <= length_m");
    }
    for (auto [side, neighbor] : {std::pair{"left", l.left}, std::pair{"right", l.right}}) {
      if (!neighbor) continue;
      if (*neighbor == l.id)
        throw ValidationError(path + "." + side, "lane cannot neighbor itself");
      if (!net.find_lane(*neighbor))
        throw ValidationError(path + "." + side,
                              "references unknown lane " + std::to_string(*neighbor));
    }
  }
  for (const Lane& l : net.lanes) {
    const std::string path = "network lane " + std::to_string(l.id);
    if (l.left && net.lane(*l.left).right != l.id)
      throw ValidationError(path + ".left", "neighbor reference is not symmetric");
    if (l.right && net.lane(*l.right).left != l.id)
      throw ValidationError(path + ".right", "neighbor reference is not symmetric");
  }
  const Lane* target = net.find_lane(net.mission.target_lane);
  if (!target)
    throw ValidationError("mission.target_lane",
                          "references unknown lane " + std::to_string(net.mission.target_lane));
  if (net.mission.must_be_in_lane_by_m) {
    double by = *net.mission.must_be_in_lane_by_m;
    double extent = target->length_m;
    for (auto neighbor : {target->left, target->right})
      if (neighbor) extent = std::max(extent, net.lane(*neighbor).length_m);
    if (!(by > 0.0 && by <= extent + kEps))
      throw ValidationError("mission.must_be_in_lane_by_m",
                            "must lie within the target or adjacent lane extent");
  }
  if (net.mission.kind == MissionKind::TakeExit && !target->exit_window_m)
    throw ValidationError("mission.target_lane",
                          "TakeExit requires a target lane with an exit window");
  if (!(net.mission.stuck_speed_mps > 0.0))
    throw ValidationError("mission.stuck_speed_mps", "must be > 0");
  if (!(net.mission.stuck_timeout_s > 0.0))
    throw ValidationError("mission.stuck_timeout_s", "must be > 0");
}

std::vector<int> occupied_lanes(const VehicleState& v) {
  std::vector<int> lanes{v.lane};
  if (v.lane_change_target && *v.lane_change_target != v.lane)
    lanes.push_back(*v.lane_change_target);
  return lanes;
}

bool lanes_overlap(const VehicleState& a, const VehicleState& b) {
  for (int la : occupied_lanes(a))
    for (int lb : occupied_lanes(b))
      if (la == lb) return true;
  return false;
}

bool any_collision(const WorldState& world) {
  for (const VehicleState& other : world.others) {
    if (!lanes_overlap(world.ego, other)) continue;
    if (std::abs(world.ego.s_m - other.s_m) < kCollisionRadiusM) return true;
  }
  return false;
}

const VehicleState* leader_of_ego(const WorldState& world) {
  const VehicleState* leader = nullptr;
  for (const VehicleState& other : world.others) {
    if (!lanes_overlap(world.ego, other)) continue;
    if (other.s_m < world.ego.s_m) continue;
    if (!leader || other.s_m < leader->s_m) leader = &other;
  }
  return leader;
}

bool on_route(const WorldState& world, const RoadNetwork& net) {
  return world.ego.lane == net.mission.target_lane;
}

std::optional<double> compliance_anchor(const WorldState& world, const RoadNetwork& net) {
  std::optional<double> anchor = net.mission.must_be_in_lane_by_m;
  const Lane& current = net.lane(world.ego.lane);
  if (current.ends_at_m && (!anchor || *current.ends_at_m < *anchor))
    anchor = current.ends_at_m;
  return anchor;
}

MissionStatus mission_status(const WorldState& world, const RoadNetwork& net) {
  if (world.fault != Fault::None) return MissionStatus::Failure;
  if (any_collision(world)) return MissionStatus::Failure;
  const VehicleState& ego = world.ego;
  for (int lane_id : occupied_lanes(ego)) {
    const Lane& l = net.lane(lane_id);
    if (l.ends_at_m && ego.s_m > *l.ends_at_m + kEps) return MissionStatus::Failure;
  }
  const MissionGoal& mission = net.mission;
  if (mission.must_be_in_lane_by_m && ego.s_m > *mission.must_be_in_lane_by_m + kEps &&
      ego.lane != mission.target_lane)
    return MissionStatus::Failure;

  bool settled = ego.lane == mission.target_lane && !ego.in_lane_change();
  if (settled) {
    const Lane& target = net.lane(mission.target_lane);
    switch (mission.kind) {
      case MissionKind::ReachEnd:
        if (ego.s_m >= target.length_m - kArrivalSlackM) return MissionStatus::Success;
        break;
      case MissionKind::TakeExit:
        if (target.exit_window_m && ego.s_m >= target.exit_window_m->first &&
            ego.s_m <= target.exit_window_m->second)
          return MissionStatus::Success;
        break;
    }
  }
  return MissionStatus::InProgress;
}

const char* to_string(MissionStatus s) {
  switch (s) {
    case MissionStatus::InProgress: return "InProgress";
    case MissionStatus::Success: return "Success";
    case MissionStatus::Failure: return "Failure";
  }
  return "?";
}

const char* to_string(Fault f) {
  switch (f) {
    case Fault::None: return "None";
    case Fault::Collision: return "Collision";
    case Fault::EndedLane: return "EndedLane";
    case Fault::MissedAnchor: return "MissedAnchor";
    case Fault::Stuck: return "Stuck";
  }
  return "?";
}

}  // namespace cormcts
