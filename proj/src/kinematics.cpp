#include "avcert/kinematics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace avcert::kinematics {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw InvariantError(what);
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw InvariantError(std::string(what) + " must be finite");
}

// Displacement of a vehicle braking from v toward zero at b, after tau seconds.
double braking_displacement(double v, double b, double tau) {
  const double t = std::min(tau, std::abs(v) / b);
  return v * t - std::copysign(0.5 * b * t * t, v);
}

struct LateralMotion {
  double v1, v2;    // lateral speeds at t = 0
  double v1p, v2p;  // lateral speeds at the end of the response time
  double accel, response_time, b1, b2;

  double x1(double t) const {
    if (t <= response_time) return v1 * t + 0.5 * accel * t * t;
    return 0.5 * (v1 + v1p) * response_time + braking_displacement(v1p, b1, t - response_time);
  }
  double x2(double t) const {
    if (t <= response_time) return v2 * t - 0.5 * accel * t * t;
    return 0.5 * (v2 + v2p) * response_time + braking_displacement(v2p, b2, t - response_time);
  }
  // Lateral speed of each vehicle at time tau into the braking phase.
  double u1(double tau) const {
    return std::abs(v1p) <= b1 * tau ? 0.0 : v1p - std::copysign(b1 * tau, v1p);
  }
  double u2(double tau) const {
    return std::abs(v2p) <= b2 * tau ? 0.0 : v2p - std::copysign(b2 * tau, v2p);
  }
  double approach(double t) const { return x1(t) - x2(t); }
};

LateralMotion make_motion(const LateralPair& pair, const LateralParams& params) {
  pair.validate();
  params.validate();
  const double P = params.response_time;
  const double a = params.lat_accel_max;
  return LateralMotion{pair.v1_lat,
                       pair.v2_lat,
                       pair.v1_lat + P * a,
                       pair.v2_lat - P * a,
                       a,
                       P,
                       params.brake_lat_min_1,
                       params.brake_lat_min_2};
}

}  // namespace

void LongitudinalParams::validate() const {
  require_finite(response_time, "response_time");
  require_finite(accel_max, "accel_max");
  require_finite(brake_min, "brake_min");
  require_finite(brake_max, "brake_max");
  require(response_time >= 0.0, "response_time must be >= 0");
  require(accel_max >= 0.0, "accel_max must be >= 0");
  require(brake_min > 0.0, "brake_min must be > 0");
  require(brake_max > 0.0, "brake_max must be > 0");
  require(brake_min <= brake_max, "brake_min must be <= brake_max");
}

void LateralParams::validate() const {
  require_finite(response_time, "response_time");
  require_finite(lat_accel_max, "lat_accel_max");
  require_finite(brake_lat_min_1, "brake_lat_min_1");
  require_finite(brake_lat_min_2, "brake_lat_min_2");
  require_finite(mu_margin, "mu_margin");
  require(response_time >= 0.0, "response_time must be >= 0");
  require(lat_accel_max >= 0.0, "lat_accel_max must be >= 0");
  require(brake_lat_min_1 > 0.0, "brake_lat_min_1 must be > 0");
  require(brake_lat_min_2 > 0.0, "brake_lat_min_2 must be > 0");
  require(mu_margin >= 0.0, "mu_margin must be >= 0");
}

void LongitudinalPair::validate() const {
  require_finite(v_rear, "v_rear");
  require_finite(v_front, "v_front");
  require_finite(gap, "gap");
  require(v_rear >= 0.0, "v_rear must be >= 0");
  require(v_front >= 0.0, "v_front must be >= 0");
  require(gap >= 0.0, "gap must be >= 0");
}

void LateralPair::validate() const {
  require_finite(v1_lat, "v1_lat");
  require_finite(v2_lat, "v2_lat");
  require_finite(lateral_gap, "lateral_gap");
  require(lateral_gap >= 0.0, "lateral_gap must be >= 0");
}

void AdhesionContext::validate() const {
  require_finite(adhesion_coefficient, "adhesion_coefficient");
  require(adhesion_coefficient > 0.0, "adhesion_coefficient must be > 0");
  require(gravity > 0.0, "gravity must be > 0");
}

double positive_part(double x) {
  require_finite(x, "positive_part argument");
  return std::max(x, 0.0);
}

double stopping_distance(double v, double response_time, double accel_max, double brake) {
  require(v >= 0.0, "speed must be >= 0");
  require(response_time >= 0.0, "response_time must be >= 0");
  require(brake > 0.0, "brake must be > 0");
  const double v_after = v + response_time * accel_max;
  return v * response_time + 0.5 * accel_max * response_time * response_time +
         v_after * v_after / (2.0 * brake);
}

double longitudinal_safe_distance(const LongitudinalPair& pair, const LongitudinalParams& params) {
  pair.validate();
  params.validate();
  const double rear =
      stopping_distance(pair.v_rear, params.response_time, params.accel_max, params.brake_min);
  const double front = pair.v_front * pair.v_front / (2.0 * params.brake_max);
  return positive_part(rear - front);
}

double lateral_final_approach(const LateralPair& pair, const LateralParams& params) {
  const LateralMotion m = make_motion(pair, params);
  const double P = m.response_time;
  const double left = 0.5 * (m.v1 + m.v1p) * P + m.v1p * std::abs(m.v1p) / (2.0 * m.b1);
  const double right = 0.5 * (m.v2 + m.v2p) * P + m.v2p * std::abs(m.v2p) / (2.0 * m.b2);
  return left - right;
}

double lateral_safe_distance(const LateralPair& pair, const LateralParams& params) {
  const LateralMotion m = make_motion(pair, params);
  const double P = m.response_time;

  // Closing speed is increasing during the response time, so the approach
  // peaks at an endpoint there. In the braking phase it is piecewise linear
  // with kinks where each vehicle stops; a peak inside a piece sits where the
  // closing speed crosses zero.
  const double tau1 = std::abs(m.v1p) / m.b1;
  const double tau2 = std::abs(m.v2p) / m.b2;
  const std::array<double, 3> knots{0.0, std::min(tau1, tau2), std::max(tau1, tau2)};
  double peak = std::max(0.0, m.approach(P));
  for (int k = 0; k < 2; ++k) {
    const double lo = knots[k];
    const double hi = knots[k + 1];
    peak = std::max(peak, m.approach(P + hi));
    if (hi <= lo) continue;
    const double c_lo = m.u1(lo) - m.u2(lo);
    const double c_hi = m.u1(hi) - m.u2(hi);
    if (c_lo > 0.0 && c_hi < 0.0) {
      const double tau = lo + (hi - lo) * c_lo / (c_lo - c_hi);
      peak = std::max(peak, m.approach(P + tau));
    }
  }
  return params.mu_margin + positive_part(peak);
}

double two_second_gap(double v_rear) {
  require_finite(v_rear, "v_rear");
  require(v_rear >= 0.0, "v_rear must be >= 0");
  return 2.0 * v_rear;
}

LongitudinalParams effective_braking(const LongitudinalParams& params, const AdhesionContext& ctx) {
  params.validate();
  ctx.validate();
  const double friction_limit = ctx.adhesion_coefficient * ctx.gravity;
  LongitudinalParams out = params;
  out.brake_min = std::min(params.brake_min, friction_limit);
  out.brake_max = std::min(params.brake_max, friction_limit);
  return out;
}

}  // namespace avcert::kinematics
