#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>

#include "avcert/kinematics.hpp"
#include "avcert/world.hpp"

namespace avcert::rules {

using kinematics::LateralParams;
using kinematics::LongitudinalParams;

enum class Status { Safe, Dangerous, NotApplicable };

const char* to_string(Status s);

struct RuleVerdict {
  int rule = 0;
  Status status = Status::NotApplicable;
  std::optional<double> margin;    // actual minus required distance (rules 1 and 2)
  std::optional<double> required;  // required distance (rules 1 and 2)
  std::optional<AgentId> other;    // counterpart agent, when one was selected
  std::optional<double> stop_within;  // distance ego must stop within (rule 3)
  std::optional<double> speed_cap;    // speed ego must not exceed (rule 4)
  std::string detail;

  bool dangerous() const { return status == Status::Dangerous; }
};

using Verdicts = std::array<RuleVerdict, 5>;

enum class Maneuver { Maintain, Brake, FullBrake, LaneChange };

const char* to_string(Maneuver m);

struct AccelRange {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double a, double tol = 1e-9) const { return a >= lo - tol && a <= hi + tol; }
};

struct ProperResponse {
  AccelRange lon;
  AccelRange lat;
  Maneuver maneuver = Maneuver::Maintain;
  int target_lane = -1;  // only for LaneChange
};

/// Options shared by the response planners. `brake_cap` is the physical
/// braking limit of the ego; unset means lon.brake_max.
struct ResponseOptions {
  std::optional<double> brake_cap;
};

// Pairwise checks. These are what the world-level rules evaluate once the
// counterpart has been selected.
RuleVerdict rule1_pair(const VehicleState& rear, const VehicleState& front,
                       const LongitudinalParams& lon);
RuleVerdict rule2_pair(const VehicleState& a, const VehicleState& b, const LateralParams& lat);

/// Nearest same-lane agent ahead of the ego (ties by lower id), if any.
const VehicleState* nearest_ahead(const WorldState& world);
/// Laterally nearest agent whose body overlaps the ego's longitudinally and
/// whose centre lies within two lane widths.
const VehicleState* lateral_neighbour(const WorldState& world);

RuleVerdict evaluate_rule1(const WorldState& world, const LongitudinalParams& lon);
RuleVerdict evaluate_rule2(const WorldState& world, const LateralParams& lat);
RuleVerdict evaluate_rule3(const WorldState& world, const LongitudinalParams& lon);
RuleVerdict evaluate_rule4(const WorldState& world, const LongitudinalParams& lon);
RuleVerdict evaluate_rule5(const WorldState& world, const LongitudinalParams& lon,
                           const LateralParams& lat, const ResponseOptions& opts = {});

Verdicts evaluate_all(const WorldState& world, const LongitudinalParams& lon,
                      const LateralParams& lat, const ResponseOptions& opts = {});

/// Largest speed from which the ego can still stop within
/// `distance_to_conflict`, capped at `speed_limit`.
double max_speed_under_occlusion(const OcclusionZone& zone, double distance_to_conflict,
                                 const LongitudinalParams& lon,
                                 double speed_limit = std::numeric_limits<double>::infinity());

/// True when even immediate full braking cannot keep the ego behind its front
/// vehicle should that vehicle brake as hard as allowed.
bool collision_unavoidable(const WorldState& world, const LongitudinalParams& lon,
                           const ResponseOptions& opts = {});

/// Candidate order is fixed: lane change left, lane change right, full brake.
ProperResponse plan_evasion(const WorldState& world, const LongitudinalParams& lon,
                            const LateralParams& lat, const ResponseOptions& opts = {});

ProperResponse proper_response(const WorldState& world, const LongitudinalParams& lon,
                               const LateralParams& lat, const ResponseOptions& opts = {});

/// Same as above, reusing verdicts already computed for this world.
ProperResponse proper_response(const WorldState& world, const Verdicts& verdicts,
                               const LongitudinalParams& lon, const LateralParams& lat,
                               const ResponseOptions& opts = {});

}  // namespace avcert::rules
