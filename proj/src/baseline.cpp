#include "cormcts/baseline.hpp"

namespace cormcts {

FixedHorizonPlan plan_fixed(const WorldState& world, const RoadNetwork& net,
                            const FixedHorizonConfig& config, const UtilityWeights& weights,
                            const DynamicsParams& dynamics, VehicleModel model) {
  FixedHorizonPlan out;
  for (ManeuverAction a : kAllActions) {
    if (!action_feasible(net, world, a)) continue;
    // One sustained action across the whole horizon, judged only by where it
    // ends up. Collisions abort the rollout; slower-burning route trouble is
    // visible only if the endpoint itself is already past the point of no
    // return — the characteristic blind spot of a fixed-horizon scheme.
    WorldState end = advance(net, world, a, dynamics, model, config.horizon_s,
                             /*latch_route_faults=*/false);
    FixedHorizonRow row;
    row.action = a;
    row.breakdown = evaluate_profit(end, net, a, weights, dynamics);
    row.v = row.breakdown.total;
    row.end_world = std::move(end);
    out.table.push_back(std::move(row));
  }
  if (out.table.empty()) throw NoFeasibleAction("no feasible maneuver from this state");
  std::size_t best = 0;
  for (std::size_t i = 1; i < out.table.size(); ++i)
    if (out.table[i].v > out.table[best].v) best = i;
  out.action = out.table[best].action;
  return out;
}

}  // namespace cormcts
