#include <algorithm>
#include <cmath>
#include <sstream>

#include "avcert/simulator.hpp"

namespace avcert::simulator {

namespace {

constexpr double kBrakeTolerance = 1e-6;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

bool ahead_of(const VehicleState& a, const VehicleState& b) {
  return a.s > b.s || (a.s == b.s && a.id > b.id);
}

struct Pair {
  const VehicleState* a = nullptr;
  const VehicleState* b = nullptr;
  bool present() const { return a && b; }
};

Pair pair_in(const Frame& f, const AgentId& x, const AgentId& y) {
  return {f.world.find(x), f.world.find(y)};
}

bool lon_dangerous(const Frame& f, const AgentId& x, const AgentId& y, const Trace& t) {
  const Pair p = pair_in(f, x, y);
  if (!p.present() || p.a->lane_index != p.b->lane_index) return false;
  const VehicleState& rear = ahead_of(*p.a, *p.b) ? *p.b : *p.a;
  const VehicleState& front = ahead_of(*p.a, *p.b) ? *p.a : *p.b;
  return rules::rule1_pair(rear, front, t.lon).dangerous();
}

bool lat_dangerous(const Frame& f, const AgentId& x, const AgentId& y, const Trace& t) {
  const Pair p = pair_in(f, x, y);
  return p.present() && rules::rule2_pair(*p.a, *p.b, t.lat).dangerous();
}

// First frame of the Dangerous episode that is still running at the last frame.
template <class Pred>
std::size_t episode_start(const Trace& t, Pred dangerous) {
  std::size_t k = t.frames.size() - 1;
  if (!dangerous(t.frames[k])) return k;
  while (k > 0 && dangerous(t.frames[k - 1])) --k;
  return k;
}

// Lateral speed of `a` toward `b`; positive when closing.
double lateral_speed_toward(const VehicleState& a, const VehicleState& b) {
  return a.d < b.d ? a.v_lat : -a.v_lat;
}

void blame(BlameReport& r, const AgentId& id, double time, int rule, std::string text) {
  if (std::find(r.blamed.begin(), r.blamed.end(), id) == r.blamed.end()) r.blamed.push_back(id);
  r.rationale[id].push_back({time, rule, std::move(text)});
}

}  // namespace

BlameReport assign_blame(const Trace& trace) {
  BlameReport report;
  if (!trace.collision || trace.frames.empty()) return report;
  const AgentId& x = trace.collision->agents.first;
  const AgentId& y = trace.collision->agents.second;
  const Frame& last = trace.frames.back();
  const Pair at_hit = pair_in(last, x, y);
  if (!at_hit.present()) return report;

  if (at_hit.a->lane_index == at_hit.b->lane_index) {
    const bool x_ahead = ahead_of(*at_hit.a, *at_hit.b);
    const AgentId& front = x_ahead ? x : y;
    const AgentId& follower = x_ahead ? y : x;
    const std::size_t k0 =
        episode_start(trace, [&](const Frame& f) { return lon_dangerous(f, x, y, trace); });
    const Frame& start = trace.frames[k0];
    if (k0 > 0) {
      const Frame& prev = trace.frames[k0 - 1];
      const Pair before = pair_in(prev, x, y);
      if (before.present() && before.a->lane_index != before.b->lane_index) {
        for (const AgentId& id : {x, y}) {
          if (prev.world.find(id)->lane_index != start.world.find(id)->lane_index)
            blame(report, id, start.time, 1,
                  "entered lane " + std::to_string(start.world.find(id)->lane_index) +
                      " inside the safe longitudinal distance");
        }
      }
    }
    if (report.blamed.empty())
      blame(report, follower, start.time, 1,
            k0 == 0 ? "was already inside the safe longitudinal distance"
                    : "closed below the safe longitudinal distance");
    for (std::size_t k = k0; k < trace.frames.size(); ++k) {
      const auto it = trace.frames[k].commands.find(front);
      if (it != trace.frames[k].commands.end() &&
          it->second.lon < -trace.lon.brake_max - kBrakeTolerance) {
        blame(report, front, trace.frames[k].time, 1,
              "braked at " + fmt(-it->second.lon) + " m/s^2, beyond the allowed " +
                  fmt(trace.lon.brake_max));
        break;
      }
    }
    return report;
  }

  const std::size_t k0 =
      episode_start(trace, [&](const Frame& f) { return lat_dangerous(f, x, y, trace); });
  const Frame& start = trace.frames[k0];
  const Pair p = pair_in(start, x, y);
  const double sx = lateral_speed_toward(*p.a, *p.b);
  const double sy = lateral_speed_toward(*p.b, *p.a);
  const auto text = [](double s) { return "moved laterally toward the other at " + fmt(s) + " m/s"; };
  if (sx >= sy) blame(report, x, start.time, 2, text(sx));
  if (sy >= sx) blame(report, y, start.time, 2, text(sy));
  return report;
}

}  // namespace avcert::simulator
