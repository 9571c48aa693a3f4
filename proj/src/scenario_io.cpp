#include "avcert/scenarios.hpp"
#include "params_json.hpp"

namespace avcert {
namespace detail {

Json to_json(const kinematics::LongitudinalParams& p) {
  Json j;
  j["response_time"] = p.response_time;
  j["accel_max"] = p.accel_max;
  j["brake_min"] = p.brake_min;
  j["brake_max"] = p.brake_max;
  return j;
}

Json to_json(const kinematics::LateralParams& p) {
  Json j;
  j["response_time"] = p.response_time;
  j["lat_accel_max"] = p.lat_accel_max;
  j["brake_lat_min_1"] = p.brake_lat_min_1;
  j["brake_lat_min_2"] = p.brake_lat_min_2;
  j["mu_margin"] = p.mu_margin;
  return j;
}

Json to_json(const VehicleState& a) {
  Json j;
  j["id"] = a.id;
  j["lane"] = a.lane_index;
  j["s"] = a.s;
  j["d"] = a.d;
  j["v_lon"] = a.v_lon;
  j["v_lat"] = a.v_lat;
  j["length"] = a.length;
  j["width"] = a.width;
  return j;
}

kinematics::LongitudinalParams lon_params_from(const ObjectReader& r) {
  r.allow_only({"response_time", "accel_max", "brake_min", "brake_max"});
  kinematics::LongitudinalParams p;
  p.response_time = r.number("response_time");
  p.accel_max = r.number("accel_max");
  p.brake_min = r.number("brake_min");
  p.brake_max = r.number("brake_max");
  return p;
}

kinematics::LateralParams lat_params_from(const ObjectReader& r) {
  r.allow_only({"response_time", "lat_accel_max", "brake_lat_min_1", "brake_lat_min_2",
                "mu_margin"});
  kinematics::LateralParams p;
  p.response_time = r.number("response_time");
  p.lat_accel_max = r.number("lat_accel_max");
  p.brake_lat_min_1 = r.number("brake_lat_min_1");
  p.brake_lat_min_2 = r.number("brake_lat_min_2");
  p.mu_margin = r.number("mu_margin");
  return p;
}

VehicleState vehicle_from(const ObjectReader& r, double lane_width) {
  r.allow_only({"id", "lane", "s", "d", "v_lon", "v_lat", "length", "width"});
  VehicleState a;
  a.id = r.string("id");
  a.lane_index = static_cast<int>(r.integer("lane"));
  a.s = r.number("s");
  a.d = r.number_or("d", (a.lane_index + 0.5) * lane_width);
  a.v_lon = r.number("v_lon");
  a.v_lat = r.number_or("v_lat", 0.0);
  a.length = r.number_or("length", a.length);
  a.width = r.number_or("width", a.width);
  return a;
}

}  // namespace detail

namespace scenarios {

using detail::Json;
using detail::ObjectReader;

namespace {

const char* kind_name(ScriptedAction::Kind k) {
  switch (k) {
    case ScriptedAction::Kind::Accel: return "accel";
    case ScriptedAction::Kind::LaneChange: return "lane_change";
    case ScriptedAction::Kind::Drift: return "drift";
  }
  return "?";
}

ScriptedAction action_from(const ObjectReader& r) {
  ScriptedAction act;
  act.agent = r.string("agent");
  act.time = r.number("time");
  const std::string type = r.string("type");
  if (type == "accel") {
    r.allow_only({"agent", "time", "type", "accel"});
    act.kind = ScriptedAction::Kind::Accel;
    act.accel = r.number("accel");
  } else if (type == "lane_change") {
    r.allow_only({"agent", "time", "type", "target_lane", "lateral_speed"});
    act.kind = ScriptedAction::Kind::LaneChange;
    act.target_lane = static_cast<int>(r.integer("target_lane"));
    act.lateral_speed = r.number_or("lateral_speed", act.lateral_speed);
  } else if (type == "drift") {
    r.allow_only({"agent", "time", "type", "lateral_speed"});
    act.kind = ScriptedAction::Kind::Drift;
    act.lateral_speed = r.number("lateral_speed");
  } else {
    throw ParseError(r.child("type"), "unknown action type '" + type + "'");
  }
  return act;
}

}  // namespace

std::string to_json(const ScenarioSpec& spec) {
  Json j;
  j["id"] = spec.id;
  j["family"] = to_string(spec.family);
  j["description"] = spec.description;
  j["ego"] = spec.ego_id;
  j["road"] = {{"lane_count", spec.lane_count},
               {"lane_width", spec.lane_width},
               {"speed_limit", spec.speed_limit}};
  j["agents"] = Json::array();
  for (const auto& a : spec.initial_agents) j["agents"].push_back(detail::to_json(a));
  j["actions"] = Json::array();
  for (const auto& act : spec.scripted_actions) {
    Json a;
    a["agent"] = act.agent;
    a["time"] = act.time;
    a["type"] = kind_name(act.kind);
    switch (act.kind) {
      case ScriptedAction::Kind::Accel: a["accel"] = act.accel; break;
      case ScriptedAction::Kind::LaneChange:
        a["target_lane"] = act.target_lane;
        a["lateral_speed"] = act.lateral_speed;
        break;
      case ScriptedAction::Kind::Drift: a["lateral_speed"] = act.lateral_speed; break;
    }
    j["actions"].push_back(a);
  }
  j["params"] = {{"longitudinal", detail::to_json(spec.lon)},
                 {"lateral", detail::to_json(spec.lat)}};
  j["horizon"] = spec.horizon;
  j["dt"] = spec.dt;
  return j.dump(2) + "\n";
}

ScenarioSpec from_json(const std::string& text) {
  const Json doc = detail::parse_document(text);
  const ObjectReader r(doc, "");
  r.allow_only({"id", "family", "description", "ego", "road", "agents", "actions", "params",
                "horizon", "dt"});
  ScenarioSpec spec;
  spec.id = r.string("id");
  const std::string family = r.string("family");
  const auto f = family_from_string(family);
  if (!f) throw ParseError("/family", "unknown family '" + family + "'");
  spec.family = *f;
  spec.description = r.string_or("description", "");
  spec.ego_id = r.string_or("ego", "ego");
  if (r.has("road")) {
    const ObjectReader road = r.object("road");
    road.allow_only({"lane_count", "lane_width", "speed_limit"});
    spec.lane_count = static_cast<int>(road.integer("lane_count"));
    spec.lane_width = road.number("lane_width");
    spec.speed_limit = road.number("speed_limit");
  }
  const Json& agents = r.array("agents");
  for (std::size_t i = 0; i < agents.size(); ++i)
    spec.initial_agents.push_back(detail::vehicle_from(
        ObjectReader(agents[i], "/agents/" + std::to_string(i)), spec.lane_width));
  if (r.has("actions")) {
    const Json& actions = r.array("actions");
    for (std::size_t i = 0; i < actions.size(); ++i)
      spec.scripted_actions.push_back(
          action_from(ObjectReader(actions[i], "/actions/" + std::to_string(i))));
  }
  const ObjectReader params = r.object("params");
  params.allow_only({"longitudinal", "lateral"});
  spec.lon = detail::lon_params_from(params.object("longitudinal"));
  spec.lat = detail::lat_params_from(params.object("lateral"));
  spec.horizon = r.number("horizon");
  spec.dt = r.number("dt");
  spec.validate();
  return spec;
}

ScenarioSpec load_file(const std::string& path) {
  return from_json(detail::read_text_file(path));
}

void save_file(const ScenarioSpec& spec, const std::string& path) {
  detail::write_text_file(path, to_json(spec));
}

}  // namespace scenarios
}  // namespace avcert
