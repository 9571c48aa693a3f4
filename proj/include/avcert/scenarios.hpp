#pragma once

#include <optional>
#include <string>
#include <vector>

#include "avcert/kinematics.hpp"
#include "avcert/world.hpp"

namespace avcert::scenarios {

using kinematics::LateralParams;
using kinematics::LongitudinalParams;

enum class Family { FollowLead, LaneChange, WrongLaneTurn, Drift };

const char* to_string(Family f);
std::optional<Family> family_from_string(const std::string& s);

/// A scripted command. Acceleration commands hold until the agent's next
/// acceleration command. Lane changes steer to the target lane centre at up to
/// `lateral_speed`; drift holds a constant lateral speed (0 ends the drift).
struct ScriptedAction {
  enum class Kind { Accel, LaneChange, Drift };

  AgentId agent;
  double time = 0.0;
  Kind kind = Kind::Accel;
  double accel = 0.0;
  int target_lane = 0;
  double lateral_speed = 1.0;
};

struct ScenarioSpec {
  std::string id;
  Family family = Family::FollowLead;
  std::string description;
  AgentId ego_id = "ego";
  int lane_count = 3;
  double lane_width = 3.5;
  double speed_limit = 30.0;
  std::vector<VehicleState> initial_agents;
  std::vector<ScriptedAction> scripted_actions;
  LongitudinalParams lon;
  LateralParams lat;
  double horizon = 10.0;
  double dt = 0.01;

  /// Throws InvariantError naming the first violated invariant.
  void validate() const;
};

/// Stable ids of the built-in catalog, in catalog order.
std::vector<std::string> catalog_ids();

/// The built-in catalog: one follow-lead family in four parameterizations
/// plus safe and unsafe variants of lane change, wrong-lane turn and drift.
std::vector<ScenarioSpec> build_catalog();

std::optional<ScenarioSpec> find_in_catalog(const std::string& id);

/// Copy with a new horizon; scripted actions after it are dropped.
ScenarioSpec with_horizon(ScenarioSpec spec, double horizon);

/// Initial world. Throws InvariantError when agent bodies overlap.
WorldState instantiate(const ScenarioSpec& spec);

enum class LaneChangeVerdict { SafeChange, UnsafeChange, NotApplicable };

const char* to_string(LaneChangeVerdict v);

struct LaneChangeClassification {
  LaneChangeVerdict verdict = LaneChangeVerdict::NotApplicable;
  std::optional<AgentId> violated_follower;
  double intrusion = 0.0;  // how far inside the follower's d_min the cutter landed
};

/// Judges a completed cut-in: unsafe iff the cutter lands inside the
/// follower's longitudinal safe distance.
LaneChangeClassification classify_lane_change(const VehicleState& follower,
                                              const VehicleState& cutter_post_change,
                                              const LongitudinalParams& params);

// Scenario file format (JSON). Unknown keys are rejected; errors carry the
// JSON pointer of the offending value.
std::string to_json(const ScenarioSpec& spec);
ScenarioSpec from_json(const std::string& text);
ScenarioSpec load_file(const std::string& path);
void save_file(const ScenarioSpec& spec, const std::string& path);

}  // namespace avcert::scenarios
