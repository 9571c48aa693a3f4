#include "avcert/rules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace avcert::rules {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSpeedTolerance = 1e-9;

double brake_cap_of(const LongitudinalParams& lon, const ResponseOptions& opts) {
  const double cap = opts.brake_cap.value_or(lon.brake_max);
  if (!(cap >= lon.brake_min)) throw InvariantError("brake_cap must be >= brake_min");
  return cap;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Time for a body at speed v with constant acceleration a to cover `dist`;
// infinity when it never does.
double time_to_cover(double dist, double v, double a) {
  if (dist <= 0.0) return 0.0;
  if (a == 0.0) return v > 0.0 ? dist / v : kInf;
  const double disc = v * v + 2.0 * a * dist;
  if (disc < 0.0) return kInf;  // stops first
  return (-v + std::sqrt(disc)) / a;
}

AccelRange toward_lane_center(const WorldState& world, const VehicleState& ego, double lat_max,
                              int lane) {
  const double center = world.lane_center(lane);
  constexpr double kCentred = 0.05;
  if (ego.d < center - kCentred) return {0.0, lat_max};
  if (ego.d > center + kCentred) return {-lat_max, 0.0};
  return {-lat_max, lat_max};
}

WorldState after_lane_change(const WorldState& world, int target) {
  WorldState hypo = world;
  VehicleState* ego = hypo.find(hypo.ego_id);
  ego->lane_index = target;
  ego->d = hypo.lane_center(target);
  ego->v_lat = 0.0;
  return hypo;
}

bool lane_change_admissible(const WorldState& world, int target, const LongitudinalParams& lon,
                            const LateralParams& lat) {
  if (target < 0 || target >= world.lane_count) return false;
  const WorldState hypo = after_lane_change(world, target);
  for (const auto& agent : hypo.agents) {
    const WorldState view = hypo.with_ego(agent.id);
    const bool is_ego = agent.id == hypo.ego_id;
    for (const RuleVerdict& v : {evaluate_rule1(view, lon), evaluate_rule2(view, lat)}) {
      if (!v.dangerous()) continue;
      if (is_ego || (v.other && *v.other == hypo.ego_id)) return false;
    }
  }
  return true;
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::Safe: return "Safe";
    case Status::Dangerous: return "Dangerous";
    case Status::NotApplicable: return "NotApplicable";
  }
  return "?";
}

const char* to_string(Maneuver m) {
  switch (m) {
    case Maneuver::Maintain: return "Maintain";
    case Maneuver::Brake: return "Brake";
    case Maneuver::FullBrake: return "FullBrake";
    case Maneuver::LaneChange: return "LaneChange";
  }
  return "?";
}

RuleVerdict rule1_pair(const VehicleState& rear, const VehicleState& front,
                       const LongitudinalParams& lon) {
  const double gap = longitudinal_gap(rear, front);
  const double d_min = kinematics::longitudinal_safe_distance(
      {rear.v_lon, front.v_lon, std::max(gap, 0.0)}, lon);
  RuleVerdict v;
  v.rule = 1;
  v.other = front.id;
  v.required = d_min;
  v.margin = gap - d_min;
  v.status = gap >= d_min ? Status::Safe : Status::Dangerous;
  v.detail = "front " + front.id + ": gap " + fmt(gap) + " m, d_min " + fmt(d_min) + " m";
  return v;
}

RuleVerdict rule2_pair(const VehicleState& a, const VehicleState& b, const LateralParams& lat) {
  const bool a_left = a.d < b.d || (a.d == b.d && a.id < b.id);
  const VehicleState& left = a_left ? a : b;
  const VehicleState& right = a_left ? b : a;
  const double gap = lateral_gap(left, right);
  const double d_lat = kinematics::lateral_safe_distance(
      {left.v_lat, right.v_lat, std::max(gap, 0.0)}, lat);
  RuleVerdict v;
  v.rule = 2;
  v.other = b.id;
  v.required = d_lat;
  v.margin = gap - d_lat;
  v.status = gap >= d_lat ? Status::Safe : Status::Dangerous;
  v.detail = "neighbour " + b.id + ": lateral gap " + fmt(gap) + " m, d_lat_min " + fmt(d_lat) +
             " m";
  return v;
}

const VehicleState* nearest_ahead(const WorldState& world) {
  const VehicleState& ego = world.ego();
  const VehicleState* best = nullptr;
  for (const auto& a : world.agents) {
    if (a.id == ego.id || a.lane_index != ego.lane_index) continue;
    const bool ahead = a.s > ego.s || (a.s == ego.s && a.id > ego.id);
    if (!ahead) continue;
    if (!best || a.s < best->s || (a.s == best->s && a.id < best->id)) best = &a;
  }
  return best;
}

const VehicleState* lateral_neighbour(const WorldState& world) {
  const VehicleState& ego = world.ego();
  const VehicleState* best = nullptr;
  double best_dist = kInf;
  for (const auto& a : world.agents) {
    if (a.id == ego.id) continue;
    const bool side_by_side = a.rear() < ego.front() && a.front() > ego.rear();
    const double dist = std::abs(a.d - ego.d);
    if (!side_by_side || dist > 2.0 * world.lane_width) continue;
    if (!best || dist < best_dist || (dist == best_dist && a.id < best->id)) {
      best = &a;
      best_dist = dist;
    }
  }
  return best;
}

RuleVerdict evaluate_rule1(const WorldState& world, const LongitudinalParams& lon) {
  const VehicleState* front = nearest_ahead(world);
  if (!front) {
    RuleVerdict v;
    v.rule = 1;
    v.detail = "no vehicle ahead in lane";
    return v;
  }
  return rule1_pair(world.ego(), *front, lon);
}

RuleVerdict evaluate_rule2(const WorldState& world, const LateralParams& lat) {
  const VehicleState* other = lateral_neighbour(world);
  if (!other) {
    RuleVerdict v;
    v.rule = 2;
    v.detail = "no lateral neighbour";
    return v;
  }
  return rule2_pair(world.ego(), *other, lat);
}

RuleVerdict evaluate_rule3(const WorldState& world, const LongitudinalParams& lon) {
  RuleVerdict out;
  out.rule = 3;
  const VehicleState& ego = world.ego();
  bool any = false;
  std::string yields;
  for (const auto& zone : world.conflict_zones) {
    const VehicleState* other = world.find(zone.other_id);
    if (!other) continue;
    if (ego.rear() >= zone.s_ego_exit || other->rear() >= zone.s_other_exit) continue;
    any = true;

    // Ego keeps its current speed; the other agent may do anything within
    // +-accel_max, so it arrives as early and leaves as late as that allows.
    const double ego_in = time_to_cover(zone.s_ego_entry - ego.front(), ego.v_lon, 0.0);
    const double ego_out = time_to_cover(zone.s_ego_exit - ego.rear(), ego.v_lon, 0.0);
    const double other_in =
        time_to_cover(zone.s_other_entry - other->front(), other->v_lon, lon.accel_max);
    const double other_out =
        time_to_cover(zone.s_other_exit - other->rear(), other->v_lon, -lon.accel_max);
    const bool overlap = std::max(ego_in, other_in) <= std::min(ego_out, other_out) &&
                         std::max(ego_in, other_in) < kInf;

    const double room = zone.s_ego_entry - ego.front();
    const double stop =
        kinematics::stopping_distance(ego.v_lon, lon.response_time, lon.accel_max, lon.brake_min);
    const bool can_stop = room >= 0.0 && (ego.v_lon == 0.0 || stop <= room);
    const std::string priority =
        !zone.ego_has_formal_priority ? "unknown"
        : *zone.ego_has_formal_priority ? "ego" : "other";

    if (!overlap) {
      if (out.status == Status::NotApplicable) out.status = Status::Safe;
      continue;
    }
    if (!out.stop_within || room < *out.stop_within) {
      out.stop_within = room;
      out.other = zone.other_id;
    }
    if (can_stop) {
      if (out.status != Status::Dangerous) out.status = Status::Safe;
      yields += "yield to " + zone.other_id + " (priority " + priority + "); ";
    } else {
      out.status = Status::Dangerous;
      yields += "cannot stop before conflict with " + zone.other_id + " (priority " + priority +
                "); ";
    }
  }
  if (!any) {
    out.status = Status::NotApplicable;
    out.detail = "no active conflict zone";
  } else {
    out.detail = yields.empty() ? "occupancy intervals disjoint" : yields;
  }
  return out;
}

double max_speed_under_occlusion(const OcclusionZone& /*zone*/, double distance_to_conflict,
                                 const LongitudinalParams& lon, double speed_limit) {
  lon.validate();
  if (!(distance_to_conflict >= 0.0)) throw InvariantError("distance_to_conflict must be >= 0");
  if (distance_to_conflict == 0.0) return 0.0;
  // stopping_distance(v) = a2 v^2 + a1 v + a0, increasing in v >= 0.
  const double P = lon.response_time;
  const double b = lon.brake_min;
  const double a2 = 1.0 / (2.0 * b);
  const double a1 = P + lon.accel_max * P / b;
  const double a0 = 0.5 * lon.accel_max * P * P +
                    lon.accel_max * lon.accel_max * P * P / (2.0 * b) - distance_to_conflict;
  if (a0 >= 0.0) return 0.0;
  // Positive root, written to avoid cancellation.
  const double root = (-2.0 * a0) / (a1 + std::sqrt(a1 * a1 - 4.0 * a2 * a0));
  return std::min(root, speed_limit);
}

RuleVerdict evaluate_rule4(const WorldState& world, const LongitudinalParams& lon) {
  RuleVerdict out;
  out.rule = 4;
  const VehicleState& ego = world.ego();
  std::optional<double> cap;
  for (const auto& zone : world.occlusions) {
    if (zone.s_end <= ego.front() || zone.max_emergent_speed <= 0.0) continue;
    const double dist = std::max(0.0, zone.s_start - ego.front());
    const double v = max_speed_under_occlusion(zone, dist, lon, world.legal_speed_limit);
    cap = cap ? std::min(*cap, v) : v;
  }
  if (!cap) {
    out.detail = "no occlusion ahead";
    out.speed_cap = world.legal_speed_limit;
    return out;
  }
  out.speed_cap = *cap;
  out.status = ego.v_lon <= *cap + kSpeedTolerance ? Status::Safe : Status::Dangerous;
  out.detail = "speed " + fmt(ego.v_lon) + " m/s, occlusion cap " + fmt(*cap) + " m/s";
  return out;
}

bool collision_unavoidable(const WorldState& world, const LongitudinalParams& lon,
                           const ResponseOptions& opts) {
  const VehicleState* front = nearest_ahead(world);
  if (!front) return false;
  const VehicleState& ego = world.ego();
  const double cap = brake_cap_of(lon, opts);
  const double ego_stop = ego.v_lon * ego.v_lon / (2.0 * cap);
  const double front_stop = front->v_lon * front->v_lon / (2.0 * lon.brake_max);
  return ego_stop - front_stop > longitudinal_gap(ego, *front);
}

RuleVerdict evaluate_rule5(const WorldState& world, const LongitudinalParams& lon,
                           const LateralParams& lat, const ResponseOptions& opts) {
  RuleVerdict out;
  out.rule = 5;
  if (!collision_unavoidable(world, lon, opts)) {
    out.detail = "no unavoidable conflict";
    return out;
  }
  const ProperResponse evasion = plan_evasion(world, lon, lat, opts);
  if (evasion.maneuver == Maneuver::LaneChange) {
    out.status = Status::Safe;
    out.detail = "evade into lane " + std::to_string(evasion.target_lane);
  } else {
    out.status = Status::Dangerous;
    out.detail = "no admissible evasion; full brake";
  }
  if (const VehicleState* f = nearest_ahead(world)) out.other = f->id;
  return out;
}

Verdicts evaluate_all(const WorldState& world, const LongitudinalParams& lon,
                      const LateralParams& lat, const ResponseOptions& opts) {
  return {evaluate_rule1(world, lon), evaluate_rule2(world, lat), evaluate_rule3(world, lon),
          evaluate_rule4(world, lon), evaluate_rule5(world, lon, lat, opts)};
}

ProperResponse plan_evasion(const WorldState& world, const LongitudinalParams& lon,
                            const LateralParams& lat, const ResponseOptions& opts) {
  const double cap = brake_cap_of(lon, opts);
  const VehicleState& ego = world.ego();
  ProperResponse r;
  const RuleVerdict r1 = evaluate_rule1(world, lon);
  if (!r1.dangerous()) {
    r.lon = {-cap, lon.accel_max};
    r.lat = {-lat.lat_accel_max, lat.lat_accel_max};
    r.maneuver = Maneuver::Maintain;
    return r;
  }
  for (int target : {ego.lane_index - 1, ego.lane_index + 1}) {
    if (!lane_change_admissible(world, target, lon, lat)) continue;
    r.maneuver = Maneuver::LaneChange;
    r.target_lane = target;
    r.lon = {-cap, -lon.brake_min};
    r.lat = toward_lane_center(world, ego, lat.lat_accel_max, target);
    return r;
  }
  r.maneuver = Maneuver::FullBrake;
  r.lon = {-cap, -cap};
  r.lat = toward_lane_center(world, ego, lat.lat_accel_max, ego.lane_index);
  return r;
}

ProperResponse proper_response(const WorldState& world, const LongitudinalParams& lon,
                               const LateralParams& lat, const ResponseOptions& opts) {
  return proper_response(world, evaluate_all(world, lon, lat, opts), lon, lat, opts);
}

ProperResponse proper_response(const WorldState& world, const Verdicts& v,
                               const LongitudinalParams& lon, const LateralParams& lat,
                               const ResponseOptions& opts) {
  const double cap = brake_cap_of(lon, opts);
  const VehicleState& ego = world.ego();

  if ((v[0].dangerous() || v[1].dangerous()) && v[4].status != Status::NotApplicable)
    return plan_evasion(world, lon, lat, opts);

  ProperResponse r;
  r.maneuver = Maneuver::Maintain;
  r.lon = {-cap, lon.accel_max};
  r.lat = {-lat.lat_accel_max, lat.lat_accel_max};

  auto brake_at_most = [&](double hi) {
    r.maneuver = Maneuver::Brake;
    r.lon.hi = std::min(r.lon.hi, std::max(hi, -cap));
  };

  if (v[0].dangerous() || v[1].dangerous()) {
    brake_at_most(-lon.brake_min);
    r.lat = toward_lane_center(world, ego, lat.lat_accel_max, ego.lane_index);
  }
  if (v[2].stop_within) {
    // Yielding and danger both mean: stop before the conflict entry.
    const double room = std::max(*v[2].stop_within, 1e-6);
    double needed = ego.v_lon * ego.v_lon / (2.0 * room);
    if (v[2].dangerous()) needed = std::max(needed, lon.brake_min);
    if (needed > 0.0) brake_at_most(-needed);
  }
  if (v[3].dangerous()) brake_at_most(-lon.brake_min);
  return r;
}

}  // namespace avcert::rules
