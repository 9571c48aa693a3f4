#include "avcert/scenarios.hpp"

#include <algorithm>
#include <set>

namespace avcert::scenarios {

namespace {

LongitudinalParams catalog_lon() {
  LongitudinalParams p;
  p.response_time = 0.5;
  p.accel_max = 2.0;
  p.brake_min = 4.0;
  p.brake_max = 8.0;
  return p;
}

LateralParams catalog_lat() {
  LateralParams p;
  p.response_time = 0.5;
  p.lat_accel_max = 0.5;
  p.brake_lat_min_1 = 1.0;
  p.brake_lat_min_2 = 1.0;
  p.mu_margin = 0.3;
  return p;
}

VehicleState agent(const std::string& id, int lane, double s, double v, double lane_width) {
  VehicleState a;
  a.id = id;
  a.lane_index = lane;
  a.s = s;
  a.d = (lane + 0.5) * lane_width;
  a.v_lon = v;
  return a;
}

ScenarioSpec base(const std::string& id, Family family, std::string description) {
  ScenarioSpec spec;
  spec.id = id;
  spec.family = family;
  spec.description = std::move(description);
  spec.ego_id = "ego";
  spec.lane_count = 3;
  spec.lane_width = 3.5;
  spec.speed_limit = 25.0;
  spec.lon = catalog_lon();
  spec.lat = catalog_lat();
  spec.horizon = 15.0;
  spec.dt = 0.01;
  return spec;
}

ScriptedAction accel(const AgentId& who, double t, double a) {
  ScriptedAction act;
  act.agent = who;
  act.time = t;
  act.kind = ScriptedAction::Kind::Accel;
  act.accel = a;
  return act;
}

ScriptedAction lane_change(const AgentId& who, double t, int lane, double lateral_speed) {
  ScriptedAction act;
  act.agent = who;
  act.time = t;
  act.kind = ScriptedAction::Kind::LaneChange;
  act.target_lane = lane;
  act.lateral_speed = lateral_speed;
  return act;
}

ScriptedAction drift(const AgentId& who, double t, double lateral_speed) {
  ScriptedAction act;
  act.agent = who;
  act.time = t;
  act.kind = ScriptedAction::Kind::Drift;
  act.lateral_speed = lateral_speed;
  return act;
}

ScenarioSpec follow_lead(const std::string& variant, const std::string& description,
                         double lead_speed, std::vector<ScriptedAction> actions) {
  ScenarioSpec spec = base("follow-lead/" + variant, Family::FollowLead, description);
  const double w = spec.lane_width;
  spec.initial_agents = {agent("ego", 1, 0.0, 25.0, w), agent("lead", 1, 94.5, lead_speed, w)};
  spec.scripted_actions = std::move(actions);
  return spec;
}

// The cutter starts in `from_lane` and moves into the ego's lane (1).
ScenarioSpec cut_in(const std::string& id, Family family, const std::string& description,
                    int from_lane, double cutter_s, double cutter_speed, double start,
                    double lateral_speed, std::vector<ScriptedAction> extra) {
  ScenarioSpec spec = base(id, family, description);
  const double w = spec.lane_width;
  spec.initial_agents = {agent("ego", 1, 0.0, 25.0, w),
                         agent("cutter", from_lane, cutter_s, cutter_speed, w)};
  spec.scripted_actions.push_back(lane_change("cutter", start, 1, lateral_speed));
  for (auto& a : extra) spec.scripted_actions.push_back(std::move(a));
  return spec;
}

ScenarioSpec drifting(const std::string& id, const std::string& description,
                      std::vector<ScriptedAction> actions) {
  ScenarioSpec spec = base(id, Family::Drift, description);
  const double w = spec.lane_width;
  spec.initial_agents = {agent("ego", 1, 0.0, 25.0, w), agent("drifter", 2, 1.0, 25.0, w)};
  spec.scripted_actions = std::move(actions);
  return spec;
}

bool bodies_overlap(const VehicleState& a, const VehicleState& b) {
  return longitudinal_gap(a, b) <= 0.0 && longitudinal_gap(b, a) <= 0.0 && lateral_gap(a, b) <= 0.0;
}

}  // namespace

const char* to_string(Family f) {
  switch (f) {
    case Family::FollowLead: return "FollowLead";
    case Family::LaneChange: return "LaneChange";
    case Family::WrongLaneTurn: return "WrongLaneTurn";
    case Family::Drift: return "Drift";
  }
  return "?";
}

std::optional<Family> family_from_string(const std::string& s) {
  for (Family f : {Family::FollowLead, Family::LaneChange, Family::WrongLaneTurn, Family::Drift})
    if (s == to_string(f)) return f;
  return std::nullopt;
}

const char* to_string(LaneChangeVerdict v) {
  switch (v) {
    case LaneChangeVerdict::SafeChange: return "SafeChange";
    case LaneChangeVerdict::UnsafeChange: return "UnsafeChange";
    case LaneChangeVerdict::NotApplicable: return "NotApplicable";
  }
  return "?";
}

void ScenarioSpec::validate() const {
  if (id.empty()) throw InvariantError("scenario id must be nonempty");
  if (!(dt > 0.0)) throw InvariantError("dt must be > 0");
  if (!(horizon >= 0.0)) throw InvariantError("horizon must be >= 0");
  lon.validate();
  lat.validate();
  WorldState w;
  w.ego_id = ego_id;
  w.agents = initial_agents;
  w.lane_count = lane_count;
  w.lane_width = lane_width;
  w.legal_speed_limit = speed_limit;
  w.validate();
  for (const auto& a : initial_agents)
    if (w.lane_at(a.d) != a.lane_index)
      throw InvariantError("agent '" + a.id + "': lateral position is outside its lane");
  std::set<AgentId> ids;
  for (const auto& a : initial_agents) ids.insert(a.id);
  for (const auto& act : scripted_actions) {
    if (!ids.count(act.agent))
      throw InvariantError("action references unknown agent '" + act.agent + "'");
    if (act.time < 0.0 || act.time > horizon)
      throw InvariantError("action time outside [0, horizon] for agent '" + act.agent + "'");
    if (act.kind == ScriptedAction::Kind::LaneChange) {
      if (act.target_lane < 0 || act.target_lane >= lane_count)
        throw InvariantError("lane change target out of range for agent '" + act.agent + "'");
      if (!(act.lateral_speed > 0.0))
        throw InvariantError("lane change needs lateral_speed > 0 for agent '" + act.agent + "'");
    }
  }
}

std::vector<ScenarioSpec> build_catalog() {
  std::vector<ScenarioSpec> out;

  // One follow-lead family; the four front-vehicle behaviours differ only in
  // the lead's script.
  out.push_back(follow_lead("front-accelerates", "Lead vehicle pulls away from the ego.", 20.0,
                            {accel("lead", 1.0, 1.5), accel("lead", 5.0, 0.0)}));
  out.push_back(follow_lead("front-slower", "Lead vehicle travels slower than the ego.", 18.0,
                            {}));
  out.push_back(follow_lead("front-decelerates", "Lead vehicle decelerates moderately.", 25.0,
                            {accel("lead", 1.0, -3.0), accel("lead", 4.0, 0.0)}));
  out.push_back(follow_lead("front-stops", "Lead vehicle brakes hard to a standstill.", 25.0,
                            {accel("lead", 1.0, -6.0)}));

  out.push_back(cut_in("lane-change/safe", Family::LaneChange,
                       "Cutter merges from the left lane well beyond the ego's safe distance.", 0,
                       120.0, 22.0, 1.0, 1.0, {accel("cutter", 8.0, -8.0)}));
  out.push_back(cut_in("lane-change/unsafe", Family::LaneChange,
                       "Cutter merges inside the ego's safe distance and then brakes hard.", 0,
                       30.0, 22.0, 0.5, 1.0, {accel("cutter", 4.0, -8.0)}));

  out.push_back(cut_in("wrong-lane-turn/safe", Family::WrongLaneTurn,
                       "Slow vehicle turns into the ego's lane far ahead.", 2, 200.0, 5.0, 0.5,
                       1.5, {accel("cutter", 0.5, 1.5), accel("cutter", 8.0, 0.0)}));
  out.push_back(cut_in("wrong-lane-turn/unsafe", Family::WrongLaneTurn,
                       "Slow vehicle turns into the ego's lane just ahead of it.", 2, 45.0, 5.0,
                       0.5, 1.5, {accel("cutter", 0.5, 1.5), accel("cutter", 8.0, 0.0)}));

  out.push_back(drifting("drift/safe", "Neighbour drifts slowly toward the ego and recovers.",
                         {drift("drifter", 1.0, -0.1), drift("drifter", 4.0, 0.0)}));
  out.push_back(drifting("drift/unsafe", "Neighbour drifts steadily into the ego's lane.",
                         {drift("drifter", 1.0, -1.0)}));
  return out;
}

std::vector<std::string> catalog_ids() {
  std::vector<std::string> ids;
  for (const auto& s : build_catalog()) ids.push_back(s.id);
  return ids;
}

std::optional<ScenarioSpec> find_in_catalog(const std::string& id) {
  for (auto& s : build_catalog())
    if (s.id == id) return s;
  return std::nullopt;
}

ScenarioSpec with_horizon(ScenarioSpec spec, double horizon) {
  spec.horizon = horizon;
  std::erase_if(spec.scripted_actions, [&](const ScriptedAction& a) { return a.time > horizon; });
  return spec;
}

WorldState instantiate(const ScenarioSpec& spec) {
  spec.validate();
  WorldState w;
  w.time = 0.0;
  w.ego_id = spec.ego_id;
  w.agents = spec.initial_agents;
  w.lane_count = spec.lane_count;
  w.lane_width = spec.lane_width;
  w.legal_speed_limit = spec.speed_limit;
  std::sort(w.agents.begin(), w.agents.end(),
            [](const VehicleState& a, const VehicleState& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < w.agents.size(); ++i)
    for (std::size_t j = i + 1; j < w.agents.size(); ++j)
      if (bodies_overlap(w.agents[i], w.agents[j]))
        throw InvariantError("agents '" + w.agents[i].id + "' and '" + w.agents[j].id +
                             "' overlap at t=0");
  return w;
}

LaneChangeClassification classify_lane_change(const VehicleState& follower,
                                              const VehicleState& cutter_post_change,
                                              const LongitudinalParams& params) {
  LaneChangeClassification out;
  const VehicleState& cutter = cutter_post_change;
  const bool ahead = cutter.s > follower.s || (cutter.s == follower.s && cutter.id > follower.id);
  if (cutter.lane_index != follower.lane_index || !ahead) return out;
  const double gap = longitudinal_gap(follower, cutter);
  const double d_min = kinematics::longitudinal_safe_distance(
      {follower.v_lon, cutter.v_lon, std::max(gap, 0.0)}, params);
  if (gap < d_min) {
    out.verdict = LaneChangeVerdict::UnsafeChange;
    out.violated_follower = follower.id;
    out.intrusion = d_min - gap;
  } else {
    out.verdict = LaneChangeVerdict::SafeChange;
  }
  return out;
}

}  // namespace avcert::scenarios
