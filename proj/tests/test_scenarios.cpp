#include <gtest/gtest.h>

#include <map>
#include <set>

#include "avcert/scenarios.hpp"
#include "json.hpp"
#include "support.hpp"

namespace avcert {
namespace {

using namespace scenarios;
using test::car;
using test::lon;
using test::set_gap;

TEST(Catalog, OneFollowLeadFamilyWithFourParameterizations) {
  std::map<Family, int> count;
  for (const auto& s : build_catalog()) ++count[s.family];
  EXPECT_EQ(count[Family::FollowLead], 4);
  EXPECT_EQ(count[Family::LaneChange], 2);
  EXPECT_EQ(count[Family::WrongLaneTurn], 2);
  EXPECT_EQ(count[Family::Drift], 2);
}

TEST(Catalog, SafeAndUnsafeVariants) {
  const auto ids = catalog_ids();
  const std::set<std::string> set(ids.begin(), ids.end());
  for (const char* family : {"lane-change", "wrong-lane-turn", "drift"}) {
    EXPECT_TRUE(set.count(std::string(family) + "/safe")) << family;
    EXPECT_TRUE(set.count(std::string(family) + "/unsafe")) << family;
  }
  EXPECT_TRUE(set.count("follow-lead/front-stops"));
  EXPECT_EQ(set.size(), ids.size());
}

TEST(Catalog, Deterministic) {
  const auto a = build_catalog();
  const auto b = build_catalog();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(to_json(a[i]), to_json(b[i]));
}

TEST(Catalog, EveryEntryRoundTrips) {
  for (const auto& s : build_catalog()) {
    const std::string text = to_json(s);
    EXPECT_EQ(to_json(from_json(text)), text) << s.id;
  }
}

TEST(Catalog, EveryEntryInstantiates) {
  for (const auto& s : build_catalog()) EXPECT_NO_THROW(instantiate(s)) << s.id;
}

TEST(Instantiate, FollowLeadHasTwoAgentsInOneLane) {
  const auto w = instantiate(*find_in_catalog("follow-lead/front-stops"));
  ASSERT_EQ(w.agents.size(), 2u);
  EXPECT_EQ(w.agents[0].lane_index, w.agents[1].lane_index);
  EXPECT_NEAR(longitudinal_gap(*w.find("ego"), *w.find("lead")), 90.0, 1e-12);
}

TEST(Instantiate, RejectsOverlappingBodies) {
  ScenarioSpec s = *find_in_catalog("follow-lead/front-stops");
  s.initial_agents[1].s = s.initial_agents[0].s + 1.0;
  EXPECT_THROW(instantiate(s), InvariantError);
}

TEST(WithHorizon, DropsLaterActionsOnly) {
  const ScenarioSpec s = with_horizon(*find_in_catalog("lane-change/unsafe"), 2.0);
  EXPECT_EQ(s.horizon, 2.0);
  ASSERT_EQ(s.scripted_actions.size(), 1u);
  EXPECT_EQ(s.scripted_actions[0].time, 0.5);
  EXPECT_NO_THROW(s.validate());
}

TEST(Validate, RejectsBadTimes) {
  ScenarioSpec s = *find_in_catalog("follow-lead/front-stops");
  s.dt = 0.0;
  EXPECT_THROW(s.validate(), InvariantError);
  s = *find_in_catalog("follow-lead/front-stops");
  s.scripted_actions[0].time = s.horizon + 1.0;
  EXPECT_THROW(s.validate(), InvariantError);
  s = *find_in_catalog("follow-lead/front-stops");
  s.scripted_actions[0].agent = "ghost";
  EXPECT_THROW(s.validate(), InvariantError);
}

TEST(Classify, UnsafeCutInIntrusion) {
  VehicleState follower = car("follower", 1, 0, 30);
  VehicleState cutter = car("cutter", 1, 0, 30);
  set_gap(follower, cutter, 50);
  const auto c = classify_lane_change(follower, cutter, lon(1, 2, 4, 8));
  EXPECT_EQ(c.verdict, LaneChangeVerdict::UnsafeChange);
  EXPECT_EQ(*c.violated_follower, "follower");
  EXPECT_NEAR(c.intrusion, 52.75, 1e-9);
}

TEST(Classify, SafeCutIn) {
  VehicleState follower = car("follower", 1, 0, 30);
  VehicleState cutter = car("cutter", 1, 0, 30);
  set_gap(follower, cutter, 110);
  const auto c = classify_lane_change(follower, cutter, lon(1, 2, 4, 8));
  EXPECT_EQ(c.verdict, LaneChangeVerdict::SafeChange);
  EXPECT_FALSE(c.violated_follower);
}

TEST(Classify, DifferentLanesNotApplicable) {
  VehicleState follower = car("follower", 1, 0, 30);
  VehicleState cutter = car("cutter", 2, 20, 30);
  EXPECT_EQ(classify_lane_change(follower, cutter, lon(1, 2, 4, 8)).verdict,
            LaneChangeVerdict::NotApplicable);
}

using Json = nlohmann::ordered_json;

Json catalog_json(const std::string& id) { return Json::parse(to_json(*find_in_catalog(id))); }

void expect_parse_error_at(const Json& j, const std::string& pointer) {
  try {
    from_json(j.dump());
    ADD_FAILURE() << "expected ParseError at " << pointer;
  } catch (const ParseError& e) {
    EXPECT_EQ(e.where(), pointer) << e.what();
  }
}

TEST(ScenarioFile, RejectsUnknownTopLevelKey) {
  Json j = catalog_json("drift/safe");
  j["extra"] = 1;
  expect_parse_error_at(j, "/extra");
}

TEST(ScenarioFile, ReportsPointerOfBadValue) {
  Json j = catalog_json("drift/safe");
  j["agents"][1]["v_lon"] = "fast";
  expect_parse_error_at(j, "/agents/1/v_lon");
}

TEST(ScenarioFile, ReportsUnknownActionType) {
  Json j = catalog_json("drift/safe");
  j["actions"][0]["type"] = "teleport";
  expect_parse_error_at(j, "/actions/0/type");
}

TEST(ScenarioFile, MalformedTextIsParseError) {
  EXPECT_THROW(from_json("{\"id\": "), ParseError);
}

TEST(ScenarioFile, InvariantViolationIsInvariantError) {
  Json j = catalog_json("drift/safe");
  j["dt"] = -1.0;
  EXPECT_THROW(from_json(j.dump()), InvariantError);
}

TEST(ScenarioFile, SaveAndLoad) {
  const auto dir = test::scratch_dir("scenario-file");
  const auto spec = *find_in_catalog("lane-change/unsafe");
  save_file(spec, (dir / "s.json").string());
  EXPECT_EQ(to_json(load_file((dir / "s.json").string())), to_json(spec));
  EXPECT_THROW(load_file((dir / "missing.json").string()), ParseError);
}

}  // namespace
}  // namespace avcert
