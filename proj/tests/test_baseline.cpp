#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>

#include "cormcts/baseline.hpp"
#include "cormcts/dynamics.hpp"
#include "cormcts/scenario.hpp"
#include "cormcts/utility.hpp"

using namespace cormcts;

namespace {

std::string scenario_path(const char* name) {
  return std::string(SCENARIO_DIR) + "/" + name;
}

std::map<ManeuverAction, double> table_values(const FixedHorizonPlan& plan) {
  std::map<ManeuverAction, double> out;
  for (const FixedHorizonRow& row : plan.table) out[row.action] = row.v;
  return out;
}

}  // namespace

TEST_CASE("five-second rollout table for the end-of-lane start state") {
  ScenarioConfig c = load_scenario(scenario_path("scenario1_end_of_lane.json"));
  FixedHorizonPlan plan = plan_fixed(c.initial, c.network, c.fixed_horizon, c.weights,
                                     c.dynamics, c.other_vehicle_model);

  // Feasible actions in declaration order; ChangeLaneRight has no lane.
  REQUIRE(plan.table.size() == 5);
  CHECK(plan.table[0].action == ManeuverAction::ChangeLaneLeft);
  CHECK(plan.table[1].action == ManeuverAction::KeepLaneAccelerate);
  CHECK(plan.table[2].action == ManeuverAction::KeepLaneSameSpeed);
  CHECK(plan.table[3].action == ManeuverAction::KeepLaneDecelerate);
  CHECK(plan.table[4].action == ManeuverAction::Stop);

  auto v = table_values(plan);
  const double w_safety = 0.30, w_legality = 0.15, w_mission = 0.30, w_efficiency = 0.15,
               w_comfort = 0.10;
  const double v0 = kmh_to_mps(20.0);
  const double limit = kmh_to_mps(50.0);

  // Changing left: ends alone on the neighbor lane at unchanged speed, with
  // 210 - (142 + 5 v0) = 40.2 m of slack > 5 v0, so mission credit is full;
  // the lane change costs half the comfort.
  double expect_cll = w_safety + w_legality + w_mission + w_efficiency * (v0 / limit) +
                      w_comfort * 0.5;
  CHECK(std::abs(v[ManeuverAction::ChangeLaneLeft] - expect_cll) < 1e-9);
  CHECK(std::abs(expect_cll - 0.86) < 1e-9);

  // Accelerating into the 6 m gap collides before the horizon: worthless.
  CHECK(v[ManeuverAction::KeepLaneAccelerate] == 0.0);

  // Following at the same speed keeps the 6 m gap: a 1.08 s time gap halves.
  double expect_klss = w_safety * (6.0 / v0 / 2.0) + w_legality + w_mission +
                       w_efficiency * (v0 / limit) + w_comfort;
  CHECK(std::abs(v[ManeuverAction::KeepLaneSameSpeed] - expect_klss) < 1e-9);

  // Braking to a standstill: standing safety is full, efficiency zero.
  double expect_kld = w_safety + w_legality + w_mission + w_comfort * 0.5;
  CHECK(std::abs(v[ManeuverAction::KeepLaneDecelerate] - expect_kld) < 1e-9);
  CHECK(std::abs(expect_kld - 0.80) < 1e-9);

  // Emergency stop: like braking but with the full comfort penalty.
  double expect_stop = w_safety + w_legality + w_mission;
  CHECK(std::abs(v[ManeuverAction::Stop] - expect_stop) < 1e-9);
  CHECK(std::abs(expect_stop - 0.75) < 1e-9);

  // The myopic argmax is the left lane change: the 210 m wall is beyond the
  // horizon's valuation.
  CHECK(plan.action == ManeuverAction::ChangeLaneLeft);
  CHECK(expect_cll > expect_klss);

  // Endpoint snapshots are preserved for inspection.
  for (const FixedHorizonRow& row : plan.table) {
    CHECK(row.v >= 0.0);
    CHECK(row.v <= 1.0);
    CHECK(std::abs(row.v - row.breakdown.total) < 1e-12);
    CHECK(row.end_world.time_s > 0.0);
  }
}

TEST_CASE("the planner is deterministic") {
  ScenarioConfig c = load_scenario(scenario_path("scenario1_end_of_lane.json"));
  FixedHorizonPlan a = plan_fixed(c.initial, c.network, c.fixed_horizon, c.weights,
                                  c.dynamics, c.other_vehicle_model);
  FixedHorizonPlan b = plan_fixed(c.initial, c.network, c.fixed_horizon, c.weights,
                                  c.dynamics, c.other_vehicle_model);
  CHECK(a.action == b.action);
  REQUIRE(a.table.size() == b.table.size());
  for (std::size_t i = 0; i < a.table.size(); ++i) {
    CHECK(a.table[i].action == b.table[i].action);
    CHECK(a.table[i].v == b.table[i].v);
  }
}

TEST_CASE("lane changes without a neighbor never enter the table") {
  ScenarioConfig c = load_scenario(scenario_path("scenario1_end_of_lane.json"));
  WorldState leftmost = c.initial;
  leftmost.ego.lane = 1;
  leftmost.others.clear();
  FixedHorizonPlan plan = plan_fixed(leftmost, c.network, c.fixed_horizon, c.weights,
                                     c.dynamics, c.other_vehicle_model);
  for (const FixedHorizonRow& row : plan.table)
    CHECK(row.action != ManeuverAction::ChangeLaneLeft);
  REQUIRE(!plan.table.empty());
  CHECK(plan.table[0].action == ManeuverAction::ChangeLaneRight);
}

TEST_CASE("on an empty road below the limit, accelerating wins") {
  ScenarioConfig c = load_scenario(scenario_path("scenario1_end_of_lane.json"));
  WorldState alone = c.initial;
  alone.others.clear();
  FixedHorizonPlan plan = plan_fixed(alone, c.network, c.fixed_horizon, c.weights,
                                     c.dynamics, c.other_vehicle_model);
  CHECK(plan.action == ManeuverAction::KeepLaneAccelerate);

  // Endpoint speed 5.56 + 7.5 m/s stays under the 13.89 m/s limit, so only
  // efficiency and comfort separate the keep-lane rows.
  const double v0 = kmh_to_mps(20.0);
  const double limit = kmh_to_mps(50.0);
  double expect = 0.30 + 0.15 + 0.30 + 0.15 * ((v0 + 1.5 * 5.0) / limit) + 0.10 * 0.625;
  auto v = table_values(plan);
  CHECK(std::abs(v[ManeuverAction::KeepLaneAccelerate] - expect) < 1e-9);
}

TEST_CASE("all-zero tables fall back to the earliest feasible action") {
  ScenarioConfig c = load_scenario(scenario_path("scenario1_end_of_lane.json"));
  // A standing car 5.5 m ahead of a 10 m/s ego: every rollout passes through
  // the collision radius before the horizon, including both lane changes
  // (the old lane stays occupied mid-change).
  WorldState boxed = c.initial;
  boxed.ego.speed_mps = 10.0;
  boxed.others[0].s_m = boxed.ego.s_m + 5.5;
  boxed.others[0].speed_mps = 0.0;

  FixedHorizonPlan plan = plan_fixed(boxed, c.network, c.fixed_horizon, c.weights,
                                     c.dynamics, c.other_vehicle_model);
  for (const FixedHorizonRow& row : plan.table) CHECK(row.v == 0.0);
  REQUIRE(!plan.table.empty());
  CHECK(plan.action == plan.table[0].action);
  CHECK(plan.action == ManeuverAction::ChangeLaneLeft);
}

TEST_CASE("each row equals one sustained open-loop rollout") {
  ScenarioConfig c = load_scenario(scenario_path("scenario1_end_of_lane.json"));
  FixedHorizonConfig short_horizon{2.0};
  FixedHorizonPlan plan = plan_fixed(c.initial, c.network, short_horizon, c.weights,
                                     c.dynamics, c.other_vehicle_model);
  REQUIRE(!plan.table.empty());
  for (const FixedHorizonRow& row : plan.table) {
    WorldState rolled = advance(c.network, c.initial, row.action, c.dynamics,
                                c.other_vehicle_model, 2.0, /*latch_route_faults=*/false);
    ProfitBreakdown b =
        evaluate_profit(rolled, c.network, row.action, c.weights, c.dynamics);
    CHECK(std::abs(row.v - b.total) < 1e-9);
    CHECK(std::abs(row.end_world.ego.s_m - rolled.ego.s_m) < 1e-9);
    CHECK(std::abs(row.end_world.time_s - rolled.time_s) < 1e-9);
  }
}
