#include "avcert/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace avcert::simulator {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kActionEps = 1e-9;
constexpr double kEgoSpeedGain = 1.0;    // 1/s, speed tracking toward the desired speed
constexpr double kEgoLateralSpeed = 1.0;  // m/s, lane keeping and lane change
constexpr int kLookaheadIterations = 30;

void integrate_lon(double& s, double& v, double a, double dt) {
  const double v1 = v + a * dt;
  if (v1 >= 0.0) {
    s += v * dt + 0.5 * a * dt * dt;
    v = v1;
  } else {
    s += v * v / (2.0 * -a);
    v = 0.0;
  }
}

void integrate_lat(double& d, double& v, double a, double dt) {
  d += v * dt + 0.5 * a * dt * dt;
  v += a * dt;
}

// Lateral acceleration steering toward `target`, arriving with zero lateral
// speed when the acceleration limit allows.
double track_lateral(double d, double v, double target, double speed, double a_max, double dt) {
  const double e = target - d;
  const double v_target = std::copysign(std::min(speed, std::sqrt(2.0 * a_max * std::abs(e))), e);
  return std::clamp((v_target - v) / dt, -a_max, a_max);
}

struct ScriptState {
  enum class Lateral { Hold, LaneChange, Drift };
  double accel = 0.0;
  Lateral lateral = Lateral::Hold;
  int target_lane = 0;
  double lateral_speed = 0.0;
};

class Script {
 public:
  explicit Script(const scenarios::ScenarioSpec& spec) : actions_(spec.scripted_actions) {
    std::stable_sort(actions_.begin(), actions_.end(),
                     [](const auto& a, const auto& b) { return a.time < b.time; });
    for (const auto& a : spec.initial_agents) states_[a.id];
  }

  void advance_to(double t) {
    using Kind = scenarios::ScriptedAction::Kind;
    while (next_ < actions_.size() && actions_[next_].time <= t + kActionEps) {
      const auto& act = actions_[next_++];
      ScriptState& st = states_[act.agent];
      switch (act.kind) {
        case Kind::Accel: st.accel = act.accel; break;
        case Kind::LaneChange:
          st.lateral = ScriptState::Lateral::LaneChange;
          st.target_lane = act.target_lane;
          st.lateral_speed = act.lateral_speed;
          break;
        case Kind::Drift:
          st.lateral = ScriptState::Lateral::Drift;
          st.lateral_speed = act.lateral_speed;
          break;
      }
    }
  }

  Command command(const WorldState& world, const VehicleState& agent, double dt) const {
    const ScriptState& st = states_.at(agent.id);
    Command c;
    c.lon = st.accel;
    switch (st.lateral) {
      case ScriptState::Lateral::Hold: break;
      case ScriptState::Lateral::LaneChange:
        c.lat = track_lateral(agent.d, agent.v_lat, world.lane_center(st.target_lane),
                              st.lateral_speed, kScriptLateralAccel, dt);
        break;
      case ScriptState::Lateral::Drift:
        c.lat = std::clamp((st.lateral_speed - agent.v_lat) / dt, -kScriptLateralAccel,
                           kScriptLateralAccel);
        break;
    }
    return c;
  }

 private:
  std::vector<scenarios::ScriptedAction> actions_;
  std::size_t next_ = 0;
  std::map<AgentId, ScriptState> states_;
};

// Gap to `front` stays at or above the safe distance after one step in which
// the ego applies `a` and the front brakes as hard as allowed.
bool lookahead_safe(const VehicleState& ego, const VehicleState& front, double a,
                    const LongitudinalParams& lon, double dt) {
  VehicleState e = ego;
  VehicleState f = front;
  integrate_lon(e.s, e.v_lon, a, dt);
  integrate_lon(f.s, f.v_lon, -lon.brake_max, dt);
  const double gap = longitudinal_gap(e, f);
  if (gap < 0.0) return false;
  return gap >= kinematics::longitudinal_safe_distance({e.v_lon, f.v_lon, gap}, lon);
}

Command rss_command(const WorldState& world, const rules::Verdicts& verdicts,
                    const LongitudinalParams& lon, const LateralParams& lat,
                    const rules::ResponseOptions& ropts, double dt) {
  using rules::Maneuver;
  const rules::ProperResponse resp = rules::proper_response(world, verdicts, lon, lat, ropts);
  const VehicleState& ego = world.ego();
  Command c;

  switch (resp.maneuver) {
    case Maneuver::Maintain: {
      double v_des = world.legal_speed_limit;
      if (verdicts[3].speed_cap) v_des = std::min(v_des, *verdicts[3].speed_cap);
      const double a_des = std::clamp((v_des - ego.v_lon) * kEgoSpeedGain, resp.lon.lo, resp.lon.hi);
      const VehicleState* front = rules::nearest_ahead(world);
      if (!front || lookahead_safe(ego, *front, a_des, lon, dt)) {
        c.lon = a_des;
      } else if (!lookahead_safe(ego, *front, resp.lon.lo, lon, dt)) {
        c.lon = resp.lon.lo;
      } else {
        double lo = resp.lon.lo;
        double hi = a_des;
        for (int i = 0; i < kLookaheadIterations; ++i) {
          const double mid = 0.5 * (lo + hi);
          (lookahead_safe(ego, *front, mid, lon, dt) ? lo : hi) = mid;
        }
        c.lon = lo;
      }
      break;
    }
    case Maneuver::Brake:
    case Maneuver::LaneChange: c.lon = resp.lon.hi; break;
    case Maneuver::FullBrake: c.lon = resp.lon.lo; break;
  }

  const int lane = resp.maneuver == Maneuver::LaneChange ? resp.target_lane : ego.lane_index;
  const double a_lat = track_lateral(ego.d, ego.v_lat, world.lane_center(lane), kEgoLateralSpeed,
                                     lat.lat_accel_max, dt);
  c.lat = std::clamp(a_lat, resp.lat.lo, resp.lat.hi);
  return c;
}

bool ahead_in_lane(const VehicleState& agent, const VehicleState& ego) {
  return agent.lane_index == ego.lane_index &&
         (agent.s > ego.s || (agent.s == ego.s && agent.id > ego.id));
}

}  // namespace

const char* to_string(EgoPolicy p) {
  return p == EgoPolicy::Rss ? "rss" : "scripted";
}

const char* to_string(AdversaryPolicy p) {
  return p == AdversaryPolicy::Scripted ? "scripted" : "worst-case";
}

WorldState step(const WorldState& world, const Commands& commands, double dt) {
  if (!(dt > 0.0)) throw InvariantError("dt must be > 0");
  WorldState next = world;
  next.time = world.time + dt;
  for (auto& a : next.agents) {
    const auto it = commands.find(a.id);
    const Command c = it == commands.end() ? Command{} : it->second;
    integrate_lon(a.s, a.v_lon, c.lon, dt);
    integrate_lat(a.d, a.v_lat, c.lat, dt);
    a.lane_index = next.lane_at(a.d);
  }
  return next;
}

std::optional<CollisionEvent> detect_collision(const WorldState& world) {
  std::vector<const VehicleState*> order;
  for (const auto& a : world.agents) order.push_back(&a);
  std::sort(order.begin(), order.end(), [](auto* x, auto* y) { return x->id < y->id; });
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const VehicleState& a = *order[i];
      const VehicleState& b = *order[j];
      if (longitudinal_gap(a, b) <= 0.0 && longitudinal_gap(b, a) <= 0.0 &&
          lateral_gap(a, b) <= 0.0) {
        CollisionEvent ev;
        ev.time = world.time;
        ev.agents = {a.id, b.id};
        ev.relative_speed = std::hypot(a.v_lon - b.v_lon, a.v_lat - b.v_lat);
        return ev;
      }
    }
  return std::nullopt;
}

RunResult run(const scenarios::ScenarioSpec& spec, const RunOptions& options) {
  WorldState world = scenarios::instantiate(spec);
  Script script(spec);
  rules::ResponseOptions ropts;
  ropts.brake_cap = options.brake_cap;

  RunResult result;
  result.min_rule1_margin = kInf;
  Trace& trace = result.trace;
  trace.scenario_id = spec.id;
  trace.dt = spec.dt;
  trace.lon = spec.lon;
  trace.lat = spec.lat;

  const long long steps = std::llround(spec.horizon / spec.dt);
  for (long long k = 0;; ++k) {
    world.time = static_cast<double>(k) * spec.dt;
    script.advance_to(world.time);

    Frame frame;
    frame.time = world.time;
    const rules::Verdicts ego_verdicts = rules::evaluate_all(world, spec.lon, spec.lat, ropts);
    frame.verdicts[world.ego_id] = ego_verdicts;
    if (options.all_agent_verdicts)
      for (const auto& a : world.agents)
        if (a.id != world.ego_id)
          frame.verdicts[a.id] =
              rules::evaluate_all(world.with_ego(a.id), spec.lon, spec.lat, ropts);

    for (const auto& v : ego_verdicts)
      if (v.dangerous()) result.ego_rule_violation = true;
    if (ego_verdicts[0].margin)
      result.min_rule1_margin = std::min(result.min_rule1_margin, *ego_verdicts[0].margin);

    const VehicleState& ego = world.ego();
    for (const auto& a : world.agents) {
      Command c;
      if (a.id == world.ego_id && options.ego == EgoPolicy::Rss) {
        c = rss_command(world, ego_verdicts, spec.lon, spec.lat, ropts, spec.dt);
      } else {
        c = script.command(world, a, spec.dt);
        if (a.id != world.ego_id && options.adversary == AdversaryPolicy::WorstCase &&
            ahead_in_lane(a, ego))
          c.lon = -spec.lon.brake_max;
      }
      frame.commands[a.id] = c;
    }

    frame.world = world;
    const auto collision = detect_collision(world);
    const Commands commands = frame.commands;
    if (options.keep_frames) trace.frames.push_back(std::move(frame));
    if (collision) {
      trace.collision = collision;
      break;
    }
    if (k >= steps) break;
    world = step(world, commands, spec.dt);
  }
  return result;
}

namespace {

// Share of step k that lies inside the response time.
double response_fraction(long long k, double dt, double response_time) {
  const double t = static_cast<double>(k) * dt;
  return std::clamp((response_time - t) / dt, 0.0, 1.0);
}

}  // namespace

double worst_case_gap_oracle(double v_rear, double v_front, const LongitudinalParams& p,
                             double dt) {
  p.validate();
  if (!(dt > 0.0)) throw InvariantError("dt must be > 0");
  // Semi-implicit Euler rollout; overlap means the bumper gap went negative.
  const auto collides = [&](double gap) {
    double xr = 0.0, vr = v_rear, xf = gap, vf = v_front;
    for (long long k = 0;; ++k) {
      const double resp = response_fraction(k, dt, p.response_time);
      if (resp == 0.0 && vr == 0.0 && vf == 0.0) return false;
      const double ar = resp * p.accel_max - (1.0 - resp) * p.brake_min;
      vr = std::max(0.0, vr + ar * dt);
      vf = std::max(0.0, vf - p.brake_max * dt);
      xr += vr * dt;
      xf += vf * dt;
      if (xf - xr < 0.0) return true;
    }
  };
  if (!collides(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (collides(hi)) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    (collides(mid) ? lo : hi) = mid;
  }
  return hi;
}

double worst_case_lateral_oracle(double v1, double v2, const LateralParams& p, double dt) {
  p.validate();
  if (!(dt > 0.0)) throw InvariantError("dt must be > 0");
  // Vehicle 1 on the left swerves right, vehicle 2 swerves left; afterwards
  // each brakes until its lateral speed is zero.
  const auto brake = [&](double v, double dv) {
    if (v == 0.0) return 0.0;
    const double next = v - std::copysign(dv, v);
    return (next > 0.0) == (v > 0.0) && next != 0.0 ? next : 0.0;
  };
  const auto collides = [&](double gap) {
    double x1 = 0.0, u1 = v1, x2 = gap, u2 = v2;
    for (long long k = 0;; ++k) {
      const double resp = response_fraction(k, dt, p.response_time);
      if (resp == 0.0 && u1 == 0.0 && u2 == 0.0) return false;
      u1 += resp * p.lat_accel_max * dt;
      u2 -= resp * p.lat_accel_max * dt;
      if (resp < 1.0) {
        u1 = brake(u1, (1.0 - resp) * p.brake_lat_min_1 * dt);
        u2 = brake(u2, (1.0 - resp) * p.brake_lat_min_2 * dt);
      }
      x1 += u1 * dt;
      x2 += u2 * dt;
      if (x2 - x1 < p.mu_margin) return true;
    }
  };
  if (!collides(p.mu_margin)) return p.mu_margin;
  double lo = p.mu_margin, step = 1.0, hi = lo + step;
  while (collides(hi)) {
    lo = hi;
    step *= 2.0;
    hi = lo + step;
  }
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    (collides(mid) ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace avcert::simulator
