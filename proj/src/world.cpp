#include "avcert/world.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "avcert/kinematics.hpp"

namespace avcert {

const VehicleState* WorldState::find(const AgentId& id) const {
  for (const auto& a : agents)
    if (a.id == id) return &a;
  return nullptr;
}

VehicleState* WorldState::find(const AgentId& id) {
  for (auto& a : agents)
    if (a.id == id) return &a;
  return nullptr;
}

const VehicleState& WorldState::ego() const {
  const VehicleState* e = find(ego_id);
  if (!e) throw InvariantError("ego '" + ego_id + "' not present in agents");
  return *e;
}

int WorldState::lane_at(double d) const {
  const int lane = static_cast<int>(std::floor(d / lane_width));
  return std::clamp(lane, 0, lane_count - 1);
}

WorldState WorldState::with_ego(const AgentId& id) const {
  WorldState w = *this;
  w.ego_id = id;
  // Conflict zones and occlusions are described from the original ego's path.
  if (id != ego_id) {
    w.conflict_zones.clear();
    w.occlusions.clear();
  }
  return w;
}

void WorldState::validate() const {
  if (lane_count < 1) throw InvariantError("lane_count must be >= 1");
  if (!(lane_width > 0.0)) throw InvariantError("lane_width must be > 0");
  if (!(legal_speed_limit >= 0.0)) throw InvariantError("legal_speed_limit must be >= 0");
  std::set<AgentId> ids;
  for (const auto& a : agents) {
    if (a.id.empty()) throw InvariantError("agent id must be nonempty");
    if (!ids.insert(a.id).second) throw InvariantError("duplicate agent id '" + a.id + "'");
    if (!(a.length > 0.0)) throw InvariantError("agent '" + a.id + "': length must be > 0");
    if (!(a.width > 0.0)) throw InvariantError("agent '" + a.id + "': width must be > 0");
    if (!(a.v_lon >= 0.0)) throw InvariantError("agent '" + a.id + "': v_lon must be >= 0");
    if (a.lane_index < 0 || a.lane_index >= lane_count)
      throw InvariantError("agent '" + a.id + "': lane index out of range");
  }
  if (!ids.count(ego_id)) throw InvariantError("ego '" + ego_id + "' not present in agents");
  for (const auto& z : occlusions) {
    if (!(z.s_start < z.s_end)) throw InvariantError("occlusion zone needs s_start < s_end");
    if (!(z.max_emergent_speed >= 0.0))
      throw InvariantError("occlusion zone needs max_emergent_speed >= 0");
  }
  std::set<AgentId> zone_owners;
  for (const auto& z : conflict_zones) {
    if (!(z.s_ego_entry < z.s_ego_exit) || !(z.s_other_entry < z.s_other_exit))
      throw InvariantError("conflict zone needs entry < exit on both paths");
    if (!ids.count(z.other_id))
      throw InvariantError("conflict zone references unknown agent '" + z.other_id + "'");
    if (!zone_owners.insert(z.other_id).second)
      throw InvariantError("more than one conflict zone for agent '" + z.other_id + "'");
  }
}

double longitudinal_gap(const VehicleState& rear, const VehicleState& front) {
  return front.rear() - rear.front();
}

double lateral_gap(const VehicleState& a, const VehicleState& b) {
  return std::abs(a.d - b.d) - 0.5 * (a.width + b.width);
}

}  // namespace avcert
