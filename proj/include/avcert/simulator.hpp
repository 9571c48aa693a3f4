#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "avcert/kinematics.hpp"
#include "avcert/rules.hpp"
#include "avcert/scenarios.hpp"
#include "avcert/world.hpp"

namespace avcert::simulator {

using kinematics::LateralParams;
using kinematics::LongitudinalParams;

struct Command {
  double lon = 0.0;
  double lat = 0.0;
};

using Commands = std::map<AgentId, Command>;

struct CollisionEvent {
  double time = 0.0;
  std::pair<AgentId, AgentId> agents;  // ordered by id
  double relative_speed = 0.0;
};

struct Frame {
  double time = 0.0;
  WorldState world;
  Commands commands;
  std::map<AgentId, rules::Verdicts> verdicts;
};

struct Trace {
  std::string scenario_id;
  double dt = 0.0;
  LongitudinalParams lon;
  LateralParams lat;
  std::vector<Frame> frames;
  std::optional<CollisionEvent> collision;
};

struct BlameEntry {
  double time = 0.0;
  int rule = 0;
  std::string text;
};

struct BlameReport {
  std::vector<AgentId> blamed;
  std::map<AgentId, std::vector<BlameEntry>> rationale;
};

enum class EgoPolicy { Rss, Scripted };
enum class AdversaryPolicy { Scripted, WorstCase };

const char* to_string(EgoPolicy p);
const char* to_string(AdversaryPolicy p);

struct RunOptions {
  EgoPolicy ego = EgoPolicy::Rss;
  AdversaryPolicy adversary = AdversaryPolicy::Scripted;
  /// Physical braking limit of the ego; unset means lon.brake_max.
  std::optional<double> brake_cap;
  /// Verdicts for every agent's seat; otherwise only the ego's.
  bool all_agent_verdicts = true;
  /// Drop frames from the returned trace (collision and summary still set).
  bool keep_frames = true;
};

/// Summary kept even when frames are dropped.
struct RunResult {
  Trace trace;
  bool ego_rule_violation = false;  // some frame had a Dangerous ego verdict
  double min_rule1_margin = 0.0;    // over frames where rule 1 applied; +inf otherwise
};

/// Scripted lateral manoeuvres are limited to this lateral acceleration.
inline constexpr double kScriptLateralAccel = 2.0;

/// Advances every agent by dt under constant accelerations. Longitudinal speed
/// stops at zero instead of reversing; positions are integrated exactly for the
/// piecewise-constant acceleration. Lane indices follow the lateral position.
WorldState step(const WorldState& world, const Commands& commands, double dt);

/// First overlapping pair in id order; touching bodies count as overlapping.
std::optional<CollisionEvent> detect_collision(const WorldState& world);

RunResult run(const scenarios::ScenarioSpec& spec, const RunOptions& options = {});

/// Agents blamed for the trace's collision, from the rule 1/2 verdict history.
BlameReport assign_blame(const Trace& trace);

/// Minimal initial bumper gap for which the worst-case rollout (rear at
/// +accel_max for the response time then -brake_min, front at -brake_max from
/// t=0, both to standstill) never overlaps. Binary search, tolerance 1e-4 m.
double worst_case_gap_oracle(double v_rear, double v_front, const LongitudinalParams& params,
                             double dt);

/// Minimal initial lateral gap such that both vehicles swerving toward each
/// other for the response time, then braking to zero lateral speed, never come
/// closer than mu_margin. v1 is the left vehicle; velocities are rightward.
double worst_case_lateral_oracle(double v1, double v2, const LateralParams& params, double dt);

// Trace export.
std::string to_json(const Trace& trace);
Trace trace_from_json(const std::string& text);
std::string to_csv(const Trace& trace);
/// Rule 1 gap against its required distance over time, for the ego.
std::string longitudinal_plot_svg(const Trace& trace);
/// Rule 2 lateral gap against its required distance over time, for the ego.
std::string lateral_plot_svg(const Trace& trace);

}  // namespace avcert::simulator
