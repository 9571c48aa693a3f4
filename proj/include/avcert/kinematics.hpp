#pragma once

#include "avcert/errors.hpp"

namespace avcert::kinematics {

inline constexpr double kGravity = 9.80665;

/// Longitudinal response bundle. Decelerations are positive magnitudes.
///
/// brake_min is the rear vehicle's guaranteed braking once it responds;
/// brake_max is the hardest braking the front vehicle may apply.
struct LongitudinalParams {
  double response_time = 0.0;
  double accel_max = 0.0;
  double brake_min = 1.0;
  double brake_max = 1.0;

  void validate() const;
};

/// Lateral response bundle. Vehicle 1 is the left vehicle, vehicle 2 the right.
struct LateralParams {
  double response_time = 0.0;
  double lat_accel_max = 0.0;
  double brake_lat_min_1 = 1.0;
  double brake_lat_min_2 = 1.0;
  double mu_margin = 0.0;

  void validate() const;
};

struct LongitudinalPair {
  double v_rear = 0.0;
  double v_front = 0.0;
  double gap = 0.0;

  void validate() const;
};

/// Lateral velocities are signed, rightward positive.
struct LateralPair {
  double v1_lat = 0.0;
  double v2_lat = 0.0;
  double lateral_gap = 0.0;

  void validate() const;
};

struct AdhesionContext {
  double adhesion_coefficient = 1.0;
  double gravity = kGravity;

  void validate() const;
};

double positive_part(double x);

/// Distance covered by a vehicle that may accelerate at `accel_max` during
/// `response_time` and then brakes at `brake` to a full stop.
double stopping_distance(double v, double response_time, double accel_max, double brake);

double longitudinal_safe_distance(const LongitudinalPair& pair, const LongitudinalParams& params);

/// Minimum lateral separation between two vehicles that both swerve toward each
/// other for the response time and then brake laterally to zero lateral speed.
///
/// Braking displacement is signed (v|v| / 2b), so a vehicle already moving away
/// keeps moving away while it brakes. The bracket is the peak relative approach
/// over the whole manoeuvre; when both vehicles end up moving the same way with
/// unequal lateral braking the peak can occur before both have stopped, and the
/// final-position expression alone would under-estimate it.
double lateral_safe_distance(const LateralPair& pair, const LateralParams& params);

/// Final-position form of the lateral bracket (no peak search), exposed for
/// comparison. Equals the bracket of lateral_safe_distance whenever the two
/// lateral brakings are equal or the vehicles do not drift the same way.
double lateral_final_approach(const LateralPair& pair, const LateralParams& params);

double two_second_gap(double v_rear);

/// Caps both braking magnitudes at the friction limit adhesion * g.
LongitudinalParams effective_braking(const LongitudinalParams& params, const AdhesionContext& ctx);

}  // namespace avcert::kinematics
