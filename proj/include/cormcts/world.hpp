#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cormcts {

// Two vehicles collide when they share a lane and their centers are closer
// than this along s.
constexpr double kCollisionRadiusM = 5.0;

inline double kmh_to_mps(double kmh) { return kmh / 3.6; }
inline double mps_to_kmh(double mps) { return mps * 3.6; }

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct ValidationError : std::runtime_error {
  ValidationError(std::string field_path, const std::string& what)
      : std::runtime_error(field_path + ": " + what), field(std::move(field_path)) {}
  std::string field;
};

struct InfeasibleAction : std::runtime_error {
  explicit InfeasibleAction(const std::string& what) : std::runtime_error(what) {}
};

struct Lane {
  int id = 0;
  double length_m = 0.0;
  double speed_limit_mps = 0.0;
  std::optional<int> left;
  std::optional<int> right;
  // Position where this lane stops being drivable; occupying it past this
  // point is a mission failure.
  std::optional<double> ends_at_m;
  // Interval of s within which this lane can be entered if it is an exit ramp.
  std::optional<std::pair<double, double>> exit_window_m;
  bool is_exit = false;
};

enum class MissionKind { ReachEnd, TakeExit };

struct MissionGoal {
  MissionKind kind = MissionKind::ReachEnd;
  int target_lane = 0;
  std::optional<double> must_be_in_lane_by_m;
  // Creeping below stuck_speed_mps for longer than stuck_timeout_s is a
  // terminal failure: a tactical planner that leaves the vehicle
  // quasi-stationary on an open road has stopped doing its job.
  double stuck_speed_mps = 2.0;
  double stuck_timeout_s = 6.0;
};

struct RoadNetwork {
  std::vector<Lane> lanes;
  MissionGoal mission;

  const Lane* find_lane(int id) const;
  const Lane& lane(int id) const;  // throws ValidationError if unknown
};

// Checks id uniqueness, neighbor resolution and symmetry, positive lengths
// and limits, window/ends_at ranges, mission target resolution.
void validate_network(const RoadNetwork& net);

struct VehicleState {
  int id = 0;
  int lane = 0;
  double s_m = 0.0;
  double speed_mps = 0.0;
  double accel_mps2 = 0.0;
  // 0 = fully in `lane`; climbs to 1 during a lane change, then `lane` swaps
  // to the target and progress resets to 0.
  double lateral_progress = 0.0;
  std::optional<int> lane_change_target;

  bool in_lane_change() const { return lateral_progress > 0.0; }
};

// Terminal defects are latched onto the world so that mission_status is
// monotone along a trace.
enum class Fault { None, Collision, EndedLane, MissedAnchor, Stuck };

struct WorldState {
  VehicleState ego;
  std::vector<VehicleState> others;
  double time_s = 0.0;
  Fault fault = Fault::None;
  // Time at which the ego last dropped below the stuck speed; used by the
  // integrator to latch Fault::Stuck once the timeout elapses.
  std::optional<double> slow_since_s;
};

enum class MissionStatus { InProgress, Success, Failure };

enum class VehicleModel { ConstantSpeed, IDM };

// Lanes a vehicle currently occupies: its own lane, plus the change target
// while a lane change is in flight.
std::vector<int> occupied_lanes(const VehicleState& v);

bool lanes_overlap(const VehicleState& a, const VehicleState& b);

// Ego-centric collision test against every interacting vehicle.
bool any_collision(const WorldState& world);

// Nearest interacting vehicle ahead of the ego in any lane the ego occupies.
// Returns nullptr when the road ahead is clear.
const VehicleState* leader_of_ego(const WorldState& world);

bool on_route(const WorldState& world, const RoadNetwork& net);

// Longitudinal position past which mission compliance lapses for an off-route
// ego: min of mission.must_be_in_lane_by_m and the current lane's ends_at_m.
std::optional<double> compliance_anchor(const WorldState& world, const RoadNetwork& net);

MissionStatus mission_status(const WorldState& world, const RoadNetwork& net);

const char* to_string(MissionStatus s);
const char* to_string(Fault f);

}  // namespace cormcts
