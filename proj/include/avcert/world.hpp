#pragma once

#include <optional>
#include <string>
#include <vector>

namespace avcert {

using AgentId = std::string;

/// One traffic agent in the straight multilane road frame.
///
/// `s` is the longitudinal position of the body centre, `d` the lateral
/// position of the body centre measured from the left road edge, rightward
/// positive. Lane 0 is the leftmost lane.
struct VehicleState {
  AgentId id;
  int lane_index = 0;
  double s = 0.0;
  double d = 0.0;
  double v_lon = 0.0;
  double v_lat = 0.0;
  double length = 4.5;
  double width = 1.8;

  double front() const { return s + 0.5 * length; }
  double rear() const { return s - 0.5 * length; }
  double left() const { return d - 0.5 * width; }
  double right() const { return d + 0.5 * width; }
};

enum class Side { Left, Right };

struct OcclusionZone {
  double s_start = 0.0;
  double s_end = 0.0;
  Side side = Side::Right;
  double max_emergent_speed = 0.0;
  double emergence_point = 0.0;
};

struct ConflictZone {
  double s_ego_entry = 0.0;
  double s_ego_exit = 0.0;
  AgentId other_id;
  double s_other_entry = 0.0;
  double s_other_exit = 0.0;
  std::optional<bool> ego_has_formal_priority;
};

struct WorldState {
  double time = 0.0;
  AgentId ego_id;
  std::vector<VehicleState> agents;
  std::vector<OcclusionZone> occlusions;
  std::vector<ConflictZone> conflict_zones;
  int lane_count = 1;
  double lane_width = 3.5;
  double legal_speed_limit = 36.0;

  const VehicleState* find(const AgentId& id) const;
  VehicleState* find(const AgentId& id);
  const VehicleState& ego() const;

  /// Centre line of a lane in the lateral coordinate.
  double lane_center(int lane) const { return (lane + 0.5) * lane_width; }
  /// Lane containing lateral position d, clamped to the road.
  int lane_at(double d) const;

  /// Same world viewed from another agent's seat.
  WorldState with_ego(const AgentId& id) const;

  /// Throws InvariantError naming the first violated invariant.
  void validate() const;
};

/// Bumper-to-bumper gap from `rear` to `front` (negative when bodies overlap).
double longitudinal_gap(const VehicleState& rear, const VehicleState& front);

/// Gap between the nearest side surfaces (negative when bodies overlap).
double lateral_gap(const VehicleState& a, const VehicleState& b);

}  // namespace avcert
