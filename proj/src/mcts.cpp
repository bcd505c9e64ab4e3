#include "cormcts/mcts.hpp"

namespace cormcts {

std::vector<ManeuverAction> DrivingDomain::candidate_actions(const WorldState&) const {
  return {kAllActions.begin(), kAllActions.end()};
}

bool DrivingDomain::feasible(const WorldState& w, ManeuverAction a) const {
  return action_feasible(*net, w, a);
}

DrivingDomain::Outcome DrivingDomain::apply(const WorldState& w, ManeuverAction a) const {
  Outcome out;
  out.state = advance(*net, w, a, *dynamics, model, dynamics->action_duration_s,
                      /*latch_route_faults=*/true);
  out.value = evaluate_profit(out.state, *net, a, *weights, *dynamics).total;
  out.terminal = mission_status(out.state, *net) != MissionStatus::InProgress;
  return out;
}

double DrivingDomain::root_value(const WorldState& w) const {
  return evaluate_profit(w, *net, ManeuverAction::KeepLaneSameSpeed, *weights, *dynamics)
      .total;
}

double DrivingDomain::expansion_weight(const std::optional<ManeuverAction>& incoming,
                                       ManeuverAction a) const {
  if (!incoming || !is_lane_change(*incoming)) return 1.0;
  // Fresh off a lane change, settling is favored: the keep-lane family shares
  // lane_keep_bias, further changes share the remainder.
  return is_lane_change(a) ? (1.0 - lane_keep_bias) / 2.0 : lane_keep_bias / 4.0;
}

PlanResult plan(const WorldState& world, const RoadNetwork& net, const SearchConfig& config,
                const UtilityWeights& weights, const DynamicsParams& dynamics,
                VehicleModel model, bool export_tree) {
  DrivingDomain domain;
  domain.net = &net;
  domain.weights = &weights;
  domain.dynamics = &dynamics;
  domain.model = model;
  domain.lane_keep_bias = config.lane_keep_bias_after_lane_change;

  Search<DrivingDomain> search(domain, config, world);
  search.run();

  PlanResult result;
  result.action = search.best_root_action();
  result.stats = search.stats();
  if (export_tree) {
    const auto& nodes = search.nodes();
    result.tree.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& n = nodes[i];
      NodeRecord rec;
      rec.id = static_cast<int>(i);
      rec.parent = n.parent;
      rec.action = n.action;
      rec.depth = n.depth;
      rec.v = n.v;
      rec.m = n.m;
      rec.u = n.u;
      rec.terminal = n.terminal;
      rec.world = n.state;
      result.tree.push_back(std::move(rec));
    }
  }
  return result;
}

}  // namespace cormcts
