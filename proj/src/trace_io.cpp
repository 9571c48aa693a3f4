#include <iomanip>
#include <sstream>

#include "avcert/simulator.hpp"
#include "avcert/svg.hpp"
#include "params_json.hpp"

namespace avcert::simulator {

using detail::Json;
using detail::ObjectReader;

namespace {

const char* side_name(Side s) { return s == Side::Left ? "left" : "right"; }

Json world_json(const WorldState& w) {
  Json j;
  j["ego"] = w.ego_id;
  j["lane_count"] = w.lane_count;
  j["lane_width"] = w.lane_width;
  j["speed_limit"] = w.legal_speed_limit;
  j["agents"] = Json::array();
  for (const auto& a : w.agents) j["agents"].push_back(detail::to_json(a));
  j["occlusions"] = Json::array();
  for (const auto& z : w.occlusions)
    j["occlusions"].push_back({{"s_start", z.s_start},
                               {"s_end", z.s_end},
                               {"side", side_name(z.side)},
                               {"max_emergent_speed", z.max_emergent_speed},
                               {"emergence_point", z.emergence_point}});
  j["conflict_zones"] = Json::array();
  for (const auto& z : w.conflict_zones) {
    Json c = {{"s_ego_entry", z.s_ego_entry},   {"s_ego_exit", z.s_ego_exit},
              {"other", z.other_id},            {"s_other_entry", z.s_other_entry},
              {"s_other_exit", z.s_other_exit}};
    if (z.ego_has_formal_priority) c["ego_has_formal_priority"] = *z.ego_has_formal_priority;
    j["conflict_zones"].push_back(c);
  }
  return j;
}

WorldState world_from(const ObjectReader& r, double time) {
  r.allow_only({"ego", "lane_count", "lane_width", "speed_limit", "agents", "occlusions",
                "conflict_zones"});
  WorldState w;
  w.time = time;
  w.ego_id = r.string("ego");
  w.lane_count = static_cast<int>(r.integer("lane_count"));
  w.lane_width = r.number("lane_width");
  w.legal_speed_limit = r.number("speed_limit");
  const Json& agents = r.array("agents");
  for (std::size_t i = 0; i < agents.size(); ++i)
    w.agents.push_back(
        detail::vehicle_from(ObjectReader(agents[i], r.child("agents/" + std::to_string(i))),
                             w.lane_width));
  if (r.has("occlusions")) {
    const Json& zs = r.array("occlusions");
    for (std::size_t i = 0; i < zs.size(); ++i) {
      const ObjectReader z(zs[i], r.child("occlusions/" + std::to_string(i)));
      z.allow_only({"s_start", "s_end", "side", "max_emergent_speed", "emergence_point"});
      OcclusionZone o;
      o.s_start = z.number("s_start");
      o.s_end = z.number("s_end");
      const std::string side = z.string("side");
      if (side != "left" && side != "right") throw ParseError(z.child("side"), "expected left|right");
      o.side = side == "left" ? Side::Left : Side::Right;
      o.max_emergent_speed = z.number("max_emergent_speed");
      o.emergence_point = z.number("emergence_point");
      w.occlusions.push_back(o);
    }
  }
  if (r.has("conflict_zones")) {
    const Json& zs = r.array("conflict_zones");
    for (std::size_t i = 0; i < zs.size(); ++i) {
      const ObjectReader z(zs[i], r.child("conflict_zones/" + std::to_string(i)));
      z.allow_only({"s_ego_entry", "s_ego_exit", "other", "s_other_entry", "s_other_exit",
                    "ego_has_formal_priority"});
      ConflictZone c;
      c.s_ego_entry = z.number("s_ego_entry");
      c.s_ego_exit = z.number("s_ego_exit");
      c.other_id = z.string("other");
      c.s_other_entry = z.number("s_other_entry");
      c.s_other_exit = z.number("s_other_exit");
      if (z.has("ego_has_formal_priority")) c.ego_has_formal_priority = z.boolean("ego_has_formal_priority");
      w.conflict_zones.push_back(c);
    }
  }
  return w;
}

Json verdict_json(const rules::RuleVerdict& v) {
  Json j;
  j["rule"] = v.rule;
  j["status"] = rules::to_string(v.status);
  if (v.margin) j["margin"] = *v.margin;
  if (v.required) j["required"] = *v.required;
  if (v.other) j["other"] = *v.other;
  if (v.stop_within) j["stop_within"] = *v.stop_within;
  if (v.speed_cap) j["speed_cap"] = *v.speed_cap;
  j["detail"] = v.detail;
  return j;
}

rules::RuleVerdict verdict_from(const ObjectReader& r) {
  r.allow_only({"rule", "status", "margin", "required", "other", "stop_within", "speed_cap",
                "detail"});
  rules::RuleVerdict v;
  v.rule = static_cast<int>(r.integer("rule"));
  const std::string status = r.string("status");
  bool known = false;
  for (auto s : {rules::Status::Safe, rules::Status::Dangerous, rules::Status::NotApplicable})
    if (status == rules::to_string(s)) v.status = s, known = true;
  if (!known) throw ParseError(r.child("status"), "unknown status '" + status + "'");
  if (r.has("margin")) v.margin = r.number("margin");
  if (r.has("required")) v.required = r.number("required");
  if (r.has("other")) v.other = r.string("other");
  if (r.has("stop_within")) v.stop_within = r.number("stop_within");
  if (r.has("speed_cap")) v.speed_cap = r.number("speed_cap");
  v.detail = r.string_or("detail", "");
  return v;
}

const rules::Verdicts* ego_verdicts(const Frame& f) {
  const auto it = f.verdicts.find(f.world.ego_id);
  return it == f.verdicts.end() ? nullptr : &it->second;
}

std::string rule_plot(const Trace& trace, int rule, const std::string& title,
                      const std::string& gap_name, const std::string& required_name) {
  svg::Series gap{gap_name, {}, {}};
  svg::Series required{required_name, {}, {}};
  for (const auto& f : trace.frames) {
    const rules::Verdicts* v = ego_verdicts(f);
    if (!v) continue;
    const rules::RuleVerdict& r = (*v)[rule - 1];
    if (!r.required || !r.margin) continue;
    gap.x.push_back(f.time);
    gap.y.push_back(*r.required + *r.margin);
    required.x.push_back(f.time);
    required.y.push_back(*r.required);
  }
  return svg::line_plot(title + " (" + trace.scenario_id + ")", "time [s]", "distance [m]",
                        {gap, required});
}

}  // namespace

std::string to_json(const Trace& trace) {
  Json j;
  j["scenario_id"] = trace.scenario_id;
  j["dt"] = trace.dt;
  j["params"] = {{"longitudinal", detail::to_json(trace.lon)},
                 {"lateral", detail::to_json(trace.lat)}};
  j["frames"] = Json::array();
  for (const auto& f : trace.frames) {
    Json fj;
    fj["time"] = f.time;
    fj["world"] = world_json(f.world);
    fj["commands"] = Json::object();
    for (const auto& [id, c] : f.commands) fj["commands"][id] = {{"lon", c.lon}, {"lat", c.lat}};
    fj["verdicts"] = Json::object();
    for (const auto& [id, vs] : f.verdicts) {
      Json arr = Json::array();
      for (const auto& v : vs) arr.push_back(verdict_json(v));
      fj["verdicts"][id] = arr;
    }
    j["frames"].push_back(fj);
  }
  if (trace.collision) {
    j["collision"] = {{"time", trace.collision->time},
                      {"agents", {trace.collision->agents.first, trace.collision->agents.second}},
                      {"relative_speed", trace.collision->relative_speed}};
  } else {
    j["collision"] = nullptr;
  }
  return j.dump(2) + "\n";
}

Trace trace_from_json(const std::string& text) {
  const Json doc = detail::parse_document(text);
  const ObjectReader r(doc, "");
  r.allow_only({"scenario_id", "dt", "params", "frames", "collision"});
  Trace t;
  t.scenario_id = r.string("scenario_id");
  t.dt = r.number("dt");
  const ObjectReader params = r.object("params");
  params.allow_only({"longitudinal", "lateral"});
  t.lon = detail::lon_params_from(params.object("longitudinal"));
  t.lat = detail::lat_params_from(params.object("lateral"));
  const Json& frames = r.array("frames");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const ObjectReader fr(frames[i], "/frames/" + std::to_string(i));
    fr.allow_only({"time", "world", "commands", "verdicts"});
    Frame f;
    f.time = fr.number("time");
    f.world = world_from(fr.object("world"), f.time);
    const ObjectReader cmds = fr.object("commands");
    for (const auto& [id, c] : frames[i].at("commands").items()) {
      const ObjectReader cr(c, cmds.child(id));
      cr.allow_only({"lon", "lat"});
      f.commands[id] = {cr.number("lon"), cr.number("lat")};
    }
    const ObjectReader vr = fr.object("verdicts");
    for (const auto& [id, arr] : frames[i].at("verdicts").items()) {
      if (!arr.is_array() || arr.size() != 5)
        throw ParseError(vr.child(id), "expected an array of 5 verdicts");
      rules::Verdicts vs;
      for (std::size_t k = 0; k < 5; ++k)
        vs[k] = verdict_from(ObjectReader(arr[k], vr.child(id + "/" + std::to_string(k))));
      f.verdicts[id] = vs;
    }
    t.frames.push_back(std::move(f));
  }
  const Json& col = r.at("collision");
  if (!col.is_null()) {
    const ObjectReader c(col, "/collision");
    c.allow_only({"time", "agents", "relative_speed"});
    const Json& agents = c.array("agents");
    if (agents.size() != 2 || !agents[0].is_string() || !agents[1].is_string() ||
        agents[0] == agents[1])
      throw ParseError("/collision/agents", "expected two distinct agent ids");
    t.collision = CollisionEvent{c.number("time"),
                                 {agents[0].get<std::string>(), agents[1].get<std::string>()},
                                 c.number("relative_speed")};
  }
  return t;
}

std::string to_csv(const Trace& trace) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "time,id,s,d,v_lon,v_lat,lon_cmd,lat_cmd,rule1,rule2,rule3,rule4,rule5\n";
  for (const auto& f : trace.frames) {
    for (const auto& a : f.world.agents) {
      os << f.time << ',' << a.id << ',' << a.s << ',' << a.d << ',' << a.v_lon << ','
         << a.v_lat << ',';
      const auto c = f.commands.find(a.id);
      if (c != f.commands.end()) os << c->second.lon << ',' << c->second.lat;
      else os << ',';
      const auto v = f.verdicts.find(a.id);
      for (int k = 0; k < 5; ++k) {
        os << ',';
        if (v != f.verdicts.end()) os << rules::to_string(v->second[k].status);
      }
      os << '\n';
    }
  }
  return os.str();
}

std::string longitudinal_plot_svg(const Trace& trace) {
  return rule_plot(trace, 1, "Longitudinal gap vs safe distance", "gap", "d_min");
}

std::string lateral_plot_svg(const Trace& trace) {
  return rule_plot(trace, 2, "Lateral gap vs safe lateral distance", "lateral gap",
                   "d_min lateral");
}

}  // namespace avcert::simulator
