#pragma once

#include <cstdint>
#include <vector>

#include "avcert/kinematics.hpp"
#include "avcert/scenarios.hpp"
#include "avcert/simulator.hpp"

namespace avcert::sweep {

using kinematics::LateralParams;
using kinematics::LongitudinalParams;

/// Every batch kernel has a serial reference and an OpenMP version; both
/// write result i from input i only, so their outputs are identical.
enum class Mode { Serial, Parallel };

struct LongitudinalCase {
  double v_rear = 0.0;
  double v_front = 0.0;
  LongitudinalParams params;
};

struct LateralCase {
  double v1 = 0.0;
  double v2 = 0.0;
  LateralParams params;
};

struct SimulationOutcome {
  bool collision = false;
  bool ego_rule_violation = false;
  double min_rule1_margin = 0.0;
};

std::vector<double> safe_distance_batch(const std::vector<LongitudinalCase>& cases, Mode mode);
std::vector<double> lateral_distance_batch(const std::vector<LateralCase>& cases, Mode mode);
std::vector<double> longitudinal_oracle_batch(const std::vector<LongitudinalCase>& cases,
                                              double dt, Mode mode);
std::vector<double> lateral_oracle_batch(const std::vector<LateralCase>& cases, double dt,
                                         Mode mode);
std::vector<SimulationOutcome> simulate_batch(const std::vector<scenarios::ScenarioSpec>& specs,
                                              const simulator::RunOptions& options, Mode mode);

// Seeded generators. Case i depends only on (seed, i).

/// Speeds in [0, 50] m/s, response time in [0, 2] s, brake_max >= brake_min.
std::vector<LongitudinalCase> random_longitudinal_cases(std::size_t n, std::uint64_t seed);
/// Signed lateral speeds in [-2, 2] m/s with independent lateral brakings.
std::vector<LateralCase> random_lateral_cases(std::size_t n, std::uint64_t seed);
/// Single-lane follow-lead runs starting at or beyond the safe distance; the
/// lead brakes at brake_max, follows a random piecewise profile within its
/// limits, or stops hard at a random time.
std::vector<scenarios::ScenarioSpec> random_follow_lead(std::size_t n, std::uint64_t seed);

}  // namespace avcert::sweep
