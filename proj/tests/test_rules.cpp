#include <gtest/gtest.h>

#include <cmath>

#include "avcert/rules.hpp"
#include "support.hpp"

namespace avcert {
namespace {

using namespace rules;
using test::car;
using test::lat;
using test::lon;
using test::road;
using test::set_gap;

const auto kLon = lon(1, 2, 4, 8);
const auto kLat = lat(0.5, 1, 2, 2, 0.1);

WorldState follow(double gap, double v_rear = 30, double v_front = 30) {
  VehicleState ego = car("ego", 0, 0, v_rear);
  VehicleState lead = car("lead", 0, 0, v_front);
  set_gap(ego, lead, gap);
  return road(1, {ego, lead});
}

// Ego in lane 0 drifting right at 1 m/s; the neighbour in lane 1 drifts left.
WorldState side_by_side(double lateral_gap) {
  VehicleState ego = car("ego", 0, 0, 20);
  VehicleState other = car("other", 1, 0, 20);
  ego.v_lat = 1.0;
  other.v_lat = -1.0;
  other.d = ego.right() + lateral_gap + 0.5 * other.width;
  return road(2, {ego, other});
}

TEST(Rule1, AloneIsNotApplicable) {
  const auto v = evaluate_rule1(road(1, {car("ego", 0, 0, 30)}), kLon);
  EXPECT_EQ(v.status, Status::NotApplicable);
  EXPECT_FALSE(v.margin);
}

TEST(Rule1, SafeWithMargin) {
  const auto v = evaluate_rule1(follow(110), kLon);
  EXPECT_EQ(v.status, Status::Safe);
  EXPECT_NEAR(*v.margin, 7.25, 1e-9);
  EXPECT_EQ(*v.other, "lead");
}

TEST(Rule1, DangerousWithNegativeMargin) {
  const auto v = evaluate_rule1(follow(100), kLon);
  EXPECT_EQ(v.status, Status::Dangerous);
  EXPECT_NEAR(*v.margin, -2.75, 1e-9);
}

TEST(Rule1, IgnoresOtherLanesAndVehiclesBehind) {
  WorldState w = road(2, {car("ego", 0, 50, 30), car("behind", 0, 0, 30), car("beside", 1, 60, 0)});
  EXPECT_EQ(evaluate_rule1(w, kLon).status, Status::NotApplicable);
}

TEST(Rule1, NearestAheadTieBrokenByLowerId) {
  WorldState w = road(1, {car("ego", 0, 0, 10), car("b", 0, 50, 10), car("a", 0, 50, 10)});
  ASSERT_NE(nearest_ahead(w), nullptr);
  EXPECT_EQ(nearest_ahead(w)->id, "a");
}

TEST(Rule2, NoNeighbourIsNotApplicable) {
  const auto v = evaluate_rule2(road(2, {car("ego", 0, 0, 20), car("far", 1, 100, 20)}), kLat);
  EXPECT_EQ(v.status, Status::NotApplicable);
  EXPECT_FALSE(v.margin);
}

TEST(Rule2, SafeWithMargin) {
  const auto v = evaluate_rule2(side_by_side(3.0), kLat);
  EXPECT_EQ(v.status, Status::Safe);
  EXPECT_NEAR(*v.margin, 0.525, 1e-9);
}

TEST(Rule2, DangerousWithNegativeMargin) {
  const auto v = evaluate_rule2(side_by_side(2.0), kLat);
  EXPECT_EQ(v.status, Status::Dangerous);
  EXPECT_NEAR(*v.margin, -0.475, 1e-9);
}

TEST(Rule2, SymmetricInSeat) {
  const WorldState w = side_by_side(2.4);
  const auto a = evaluate_rule2(w, kLat);
  const auto b = evaluate_rule2(w.with_ego("other"), kLat);
  EXPECT_EQ(a.status, b.status);
  EXPECT_NEAR(*a.margin, *b.margin, 1e-12);
}

// Conflict path coordinates: ego enters at 50, the other agent's path enters
// its zone at 50 as well, both at 10 m/s.
WorldState crossing(double ego_speed, std::optional<bool> ego_priority) {
  WorldState w = road(2, {car("ego", 0, 0, ego_speed), car("other", 1, 0, 10)});
  ConflictZone z;
  z.s_ego_entry = 50;
  z.s_ego_exit = 60;
  z.other_id = "other";
  z.s_other_entry = 50;
  z.s_other_exit = 60;
  z.ego_has_formal_priority = ego_priority;
  w.conflict_zones.push_back(z);
  return w;
}

TEST(Rule3, NoZonesIsNotApplicable) {
  EXPECT_EQ(evaluate_rule3(follow(200), kLon).status, Status::NotApplicable);
}

TEST(Rule3, OverlapButCanStopIsSafeWithYield) {
  const auto v = evaluate_rule3(crossing(10, std::nullopt), kLon);
  EXPECT_EQ(v.status, Status::Safe);
  EXPECT_NE(v.detail.find("yield"), std::string::npos);
  ASSERT_TRUE(v.stop_within);
  EXPECT_NEAR(*v.stop_within, 50 - 2.25, 1e-12);
}

TEST(Rule3, PriorityNeverOverridesPredictedConflict) {
  // Ego occupies [2.98, 3.89] s, the other can arrive at 3.53 s;
  // stopping_distance(16, 1, 2, 4) = 57.5 > 47.75.
  const auto v = evaluate_rule3(crossing(16, true), kLon);
  EXPECT_EQ(v.status, Status::Dangerous);
  const auto r = proper_response(crossing(16, true), kLon, kLat);
  EXPECT_NE(r.maneuver, Maneuver::Maintain);
  EXPECT_LE(r.lon.hi, -kLon.brake_min);
}

TEST(Rule3, OtherClearsFirstIsSafeWithoutYield) {
  WorldState w = crossing(10, false);
  w.find("other")->s = 48;  // already inside and clear within 1.8 s; ego arrives after 4.7 s
  const auto v = evaluate_rule3(w, kLon);
  EXPECT_EQ(v.status, Status::Safe);
  EXPECT_FALSE(v.stop_within);
}

TEST(Occlusion, ZeroDistanceMeansStopped) {
  EXPECT_EQ(max_speed_under_occlusion({}, 0.0, lon(0.5, 0, 4, 8)), 0.0);
}

TEST(Occlusion, QuadraticRoot) {
  // v^2/8 + 0.5 v = 20, solved with the textbook formula.
  const double a = 1.0 / 8.0, b = 0.5, c = -20.0;
  const double expected = (-b + std::sqrt(b * b - 4 * a * c)) / (2 * a);
  const double v = max_speed_under_occlusion({}, 20.0, lon(0.5, 0, 4, 8));
  EXPECT_NEAR(v, expected, 1e-9);
  EXPECT_NEAR(v, 10.81, 5e-3);
}

TEST(Occlusion, CappedAtSpeedLimit) {
  EXPECT_EQ(max_speed_under_occlusion({}, 1000.0, lon(0.5, 0, 4, 8), 13.9), 13.9);
}

TEST(Rule4, NoOcclusionCapIsLegalLimit) {
  const WorldState w = follow(200);
  const auto v = evaluate_rule4(w, kLon);
  EXPECT_EQ(v.status, Status::NotApplicable);
  EXPECT_EQ(*v.speed_cap, w.legal_speed_limit);
}

WorldState occluded(double ego_speed) {
  WorldState w = road(1, {car("ego", 0, 0, ego_speed)});
  OcclusionZone z;
  z.s_start = w.ego().front() + 20.0;
  z.s_end = z.s_start + 10.0;
  z.max_emergent_speed = 2.0;
  w.occlusions.push_back(z);
  return w;
}

TEST(Rule4, TooFastIsDangerousAndBrakes) {
  const auto p = lon(0.5, 0, 4, 8);
  const auto v = evaluate_rule4(occluded(15), p);
  EXPECT_EQ(v.status, Status::Dangerous);
  EXPECT_NEAR(*v.speed_cap, 10.806, 1e-3);
  const auto r = proper_response(occluded(15), p, kLat);
  EXPECT_EQ(r.maneuver, Maneuver::Brake);
  EXPECT_LE(r.lon.hi, -p.brake_min);
}

TEST(Rule4, BelowCapIsSafe) {
  EXPECT_EQ(evaluate_rule4(occluded(10), lon(0.5, 0, 4, 8)).status, Status::Safe);
}

// Stopped obstacle 20 m ahead of an ego doing 20 m/s in the middle lane.
WorldState obstacle_ahead(int lanes, int ego_lane) {
  VehicleState ego = car("ego", ego_lane, 0, 20);
  VehicleState obstacle = car("obstacle", ego_lane, 0, 0);
  set_gap(ego, obstacle, 20);
  return road(lanes, {ego, obstacle});
}

TEST(PlanEvasion, LeftLaneEmptyChangesLeft) {
  const WorldState w = obstacle_ahead(3, 1);
  ASSERT_TRUE(collision_unavoidable(w, kLon));
  const auto r = plan_evasion(w, kLon, kLat);
  EXPECT_EQ(r.maneuver, Maneuver::LaneChange);
  EXPECT_EQ(r.target_lane, 0);
}

TEST(PlanEvasion, RightLaneFollowerForcesFullBrake) {
  WorldState w = obstacle_ahead(2, 0);
  w.agents.push_back(car("follower", 1, -12, 25));
  const auto r = plan_evasion(w, kLon, kLat);
  EXPECT_EQ(r.maneuver, Maneuver::FullBrake);
  EXPECT_EQ(r.lon.lo, -kLon.brake_max);
  EXPECT_EQ(r.lon.hi, -kLon.brake_max);
}

TEST(PlanEvasion, RightLaneFreeChangesRight) {
  const auto r = plan_evasion(obstacle_ahead(2, 0), kLon, kLat);
  EXPECT_EQ(r.maneuver, Maneuver::LaneChange);
  EXPECT_EQ(r.target_lane, 1);
}

TEST(PlanEvasion, NoDangerMaintains) {
  EXPECT_EQ(plan_evasion(follow(200), kLon, kLat).maneuver, Maneuver::Maintain);
}

TEST(PlanEvasion, FullBrakeHonoursBrakeCap) {
  WorldState w = obstacle_ahead(1, 0);
  ResponseOptions opts;
  opts.brake_cap = 6.0;
  const auto r = plan_evasion(w, kLon, kLat, opts);
  EXPECT_EQ(r.maneuver, Maneuver::FullBrake);
  EXPECT_EQ(r.lon.lo, -6.0);
  EXPECT_EQ(r.lon.hi, -6.0);
}

TEST(ProperResponse, AllClearMaintainsFullRange) {
  const auto r = proper_response(follow(200), kLon, kLat);
  EXPECT_EQ(r.maneuver, Maneuver::Maintain);
  EXPECT_EQ(r.lon.lo, -kLon.brake_max);
  EXPECT_EQ(r.lon.hi, kLon.accel_max);
}

TEST(ProperResponse, Rule1DangerBrakesAtLeastBrakeMin) {
  const auto r = proper_response(follow(100), kLon, kLat);
  EXPECT_EQ(r.maneuver, Maneuver::Brake);
  EXPECT_LE(r.lon.hi, -4.0);
  EXPECT_EQ(r.lon.lo, -kLon.brake_max);
}

TEST(ProperResponse, Rule2DangerSteersTowardLaneCentre) {
  WorldState w = side_by_side(2.0);
  w.find("ego")->d -= 0.3;  // left of its lane centre
  const auto r = proper_response(w, kLon, kLat);
  EXPECT_EQ(r.maneuver, Maneuver::Brake);
  EXPECT_GE(r.lat.lo, 0.0);
}

TEST(ProperResponse, RejectsBrakeCapBelowBrakeMin) {
  ResponseOptions opts;
  opts.brake_cap = 1.0;
  EXPECT_THROW(proper_response(follow(100), kLon, kLat, opts), InvariantError);
}

TEST(Rule5, NotApplicableWhenAvoidable) {
  EXPECT_EQ(evaluate_rule5(follow(100), kLon, kLat).status, Status::NotApplicable);
}

TEST(Rule5, DangerousWithoutEscape) {
  EXPECT_EQ(evaluate_rule5(obstacle_ahead(1, 0), kLon, kLat).status, Status::Dangerous);
  EXPECT_EQ(evaluate_rule5(obstacle_ahead(3, 1), kLon, kLat).status, Status::Safe);
}

}  // namespace
}  // namespace avcert
