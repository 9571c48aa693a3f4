#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>

#include "avcert/stpa.hpp"
#include "json.hpp"

namespace avcert {
namespace {

using namespace stpa;
using Json = nlohmann::ordered_json;

const std::string kFixture = std::string(AVCERT_FIXTURE_DIR) + "/av-model.json";
const std::string kIncomplete = std::string(AVCERT_FIXTURE_DIR) + "/incomplete-model.json";

ControlStructure minimal_structure() {
  ControlStructure cs;
  cs.controllers = {{"C", "controller"}};
  cs.processes = {{"P", "process"}};
  cs.control_actions = {{"act", "C", "P", "act"}};
  return cs;
}

AnalysisBase minimal_base() {
  return step0_fundamentals({{"A1", "loss", {LossCategory::Human}}}, {{"H1", "hazard", {"A1"}, ""}},
                            {{"SC1", "H1", "avoid"}}, minimal_structure());
}

TEST(Step0, MinimalInputIsValid) {
  const AnalysisBase b = minimal_base();
  EXPECT_EQ(b.hazards.size(), 1u);
  EXPECT_NE(b.control_action("act"), nullptr);
}

TEST(Step0, HazardWithoutAccidentRejected) {
  EXPECT_THROW(step0_fundamentals({{"A1", "loss", {LossCategory::Human}}}, {{"H1", "h", {}, ""}}, {},
                                  minimal_structure()),
               InvariantError);
}

TEST(Step0, DanglingLinksRejected) {
  EXPECT_THROW(step0_fundamentals({{"A1", "loss", {LossCategory::Human}}},
                                  {{"H1", "h", {"A9"}, ""}}, {}, minimal_structure()),
               InvariantError);
  EXPECT_THROW(step0_fundamentals({{"A1", "loss", {LossCategory::Human}}},
                                  {{"H1", "h", {"A1"}, ""}}, {{"SC1", "H9", "x"}},
                                  minimal_structure()),
               InvariantError);
}

TEST(Step0, EmptyStructureRejected) {
  EXPECT_THROW(step0_fundamentals({{"A1", "loss", {LossCategory::Human}}},
                                  {{"H1", "h", {"A1"}, ""}}, {}, {}),
               InvariantError);
}

TEST(Step0, ControllerWithoutActionRejected) {
  ControlStructure cs = minimal_structure();
  cs.controllers.push_back({"C2", "idle"});
  EXPECT_THROW(step0_fundamentals({{"A1", "loss", {LossCategory::Human}}},
                                  {{"H1", "h", {"A1"}, ""}}, {}, cs),
               InvariantError);
}

TEST(Step0, ShippedFixtureIsValid) { EXPECT_NO_THROW(analyze(load_model_file(kFixture))); }

TEST(ItemDefinition, OneRequirementPerAction) {
  EXPECT_EQ(derive_item_definition(minimal_base()).functional_requirements.size(), 1u);
  const Analysis a = analyze(load_model_file(kFixture));
  EXPECT_EQ(a.item.functional_requirements.size(), 3u);
}

TEST(ItemDefinition, BoundaryPartitionsStructure) {
  const Analysis a = analyze(load_model_file(kFixture));
  std::vector<std::string> all = a.item.inside;
  all.insert(all.end(), a.item.outside.begin(), a.item.outside.end());
  std::sort(all.begin(), all.end());
  EXPECT_EQ(std::adjacent_find(all.begin(), all.end()), all.end());
  std::vector<std::string> expected;
  for (const auto& n : a.base.structure.controllers) expected.push_back(n.id);
  for (const auto& n : a.base.structure.processes) expected.push_back(n.id);
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(all, expected);
}

TEST(Asil, ZeroClassIsQm) {
  for (int e = 0; e <= 4; ++e)
    for (int c = 0; c <= 3; ++c) EXPECT_EQ(asil_lookup(0, e, c), Asil::QM);
  EXPECT_EQ(asil_lookup(3, 0, 3), Asil::QM);
  EXPECT_EQ(asil_lookup(3, 4, 0), Asil::QM);
}

TEST(Asil, DefaultTableCorners) {
  EXPECT_EQ(asil_lookup(3, 4, 3), Asil::D);
  EXPECT_EQ(asil_lookup(1, 1, 1), Asil::QM);
}

TEST(Asil, OutOfRangeRejected) { EXPECT_THROW(asil_lookup(4, 1, 1), InvariantError); }

TEST(Asil, ShippedDataFileEqualsEmbeddedTable) {
  const AsilTable file = load_asil_table_file(std::string(AVCERT_DATA_DIR) + "/asil_default.json");
  for (int s = 1; s <= 3; ++s)
    for (int e = 1; e <= 4; ++e)
      for (int c = 1; c <= 3; ++c)
        EXPECT_EQ(file.lookup(s, e, c), AsilTable::default_table().lookup(s, e, c));
}

std::vector<std::array<int, 3>> all_keys() {
  std::vector<std::array<int, 3>> keys;
  for (int s = 1; s <= 3; ++s)
    for (int e = 1; e <= 4; ++e)
      for (int c = 1; c <= 3; ++c) keys.push_back({s, e, c});
  return keys;
}

TEST(AsilTableLoad, RejectsNonMonotone) {
  auto keys = all_keys();
  std::vector<Asil> values(keys.size(), Asil::A);
  values.back() = Asil::QM;  // (S3,E4,C3) below its neighbours
  EXPECT_THROW(AsilTable::from_entries("bad", keys, values), InvariantError);
}

TEST(AsilTableLoad, RejectsMissingAndDuplicate) {
  auto keys = all_keys();
  std::vector<Asil> values(keys.size(), Asil::QM);
  keys.pop_back();
  values.pop_back();
  EXPECT_THROW(AsilTable::from_entries("short", keys, values), InvariantError);
  keys.push_back(keys.front());
  values.push_back(Asil::QM);
  EXPECT_THROW(AsilTable::from_entries("dup", keys, values), InvariantError);
}

TEST(AsilTableLoad, ConstantTableIsValid) {
  auto keys = all_keys();
  const AsilTable t = AsilTable::from_entries("flat", keys, std::vector<Asil>(keys.size(), Asil::B));
  EXPECT_EQ(t.lookup(1, 1, 1), Asil::B);
  EXPECT_EQ(t.lookup(0, 1, 1), Asil::QM);
}

std::vector<OperationalSituation> two_situations() {
  return {{"OS1", "highway", "auto"}, {"OS2", "city", "auto"}};
}

TEST(Hara, OneEventPerClassifiedPair) {
  const auto ev = run_hara(minimal_base(), two_situations(),
                           {{"H1", "OS1", 3, 4, 3, "", std::nullopt}, {"H1", "OS2", 2, 3, 2, "", "Stop"}});
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[0].id, "HE-H1-OS1");
  EXPECT_EQ(ev[0].asil, Asil::D);
  EXPECT_EQ(ev[0].safety_goal, "Prevent/mitigate hazard in highway");
  EXPECT_EQ(ev[1].safety_goal, "Stop");
  for (const auto& e : ev) EXPECT_EQ(e.asil, asil_lookup(e.severity, e.exposure, e.controllability));
}

TEST(Hara, NoSituationsNoEvents) { EXPECT_TRUE(run_hara(minimal_base(), {}, {}).empty()); }

TEST(Hara, UnknownReferencesRejected) {
  EXPECT_THROW(run_hara(minimal_base(), two_situations(), {{"H9", "OS1", 1, 1, 1, "", {}}}),
               InvariantError);
  EXPECT_THROW(run_hara(minimal_base(), two_situations(), {{"H1", "OS9", 1, 1, 1, "", {}}}),
               InvariantError);
  EXPECT_THROW(run_hara(minimal_base(), two_situations(),
                        {{"H1", "OS1", 1, 1, 1, "", {}}, {"H1", "OS1", 2, 2, 2, "", {}}}),
               InvariantError);
}

TEST(Hara, FixtureGivesTwoEvents) {
  EXPECT_EQ(analyze(load_model_file(kFixture)).events.size(), 2u);
}

TEST(Ucas, GridIsActionsTimesTypes) {
  const Analysis a = analyze(load_model_file(kFixture));
  EXPECT_EQ(uca_candidate_grid(a.base).size(), 12u);
}

TEST(Ucas, NoneConfirmedGivesEmpty) {
  const AnalysisBase b = minimal_base();
  const auto ev = run_hara(b, two_situations(), {{"H1", "OS1", 3, 4, 3, "", {}}});
  EXPECT_TRUE(identify_ucas(b, ev, {{"U1", "act", UcaType::NotProvided, "ctx", {"H1"}, false}}).empty());
}

TEST(Ucas, ConfirmedWithoutHazardRejected) {
  const AnalysisBase b = minimal_base();
  const auto ev = run_hara(b, two_situations(), {{"H1", "OS1", 3, 4, 3, "", {}}});
  EXPECT_THROW(identify_ucas(b, ev, {{"U1", "act", UcaType::NotProvided, "ctx", {}, true}}),
               InvariantError);
}

TEST(Ucas, EmptyEventsRejected) {
  EXPECT_THROW(identify_ucas(minimal_base(), {}, {}), InvariantError);
}

TEST(Ucas, FixtureBrakeNotProvided) {
  const Analysis a = analyze(load_model_file(kFixture));
  ASSERT_EQ(a.ucas.size(), 1u);
  EXPECT_EQ(a.ucas[0].control_action_id, "brake");
  EXPECT_EQ(a.ucas[0].type, UcaType::NotProvided);
  EXPECT_EQ(a.ucas[0].linked_hazards, std::vector<std::string>{"H1"});
}

TEST(CausalFactors, AcceptedAndDanglingRejected) {
  const std::vector<UnsafeControlAction> ucas{{"U1", "act", UcaType::NotProvided, "ctx", {"H1"}}};
  EXPECT_EQ(analyze_causal_factors(ucas, {{"F1", "U1", "f", "s"}}).size(), 1u);
  EXPECT_THROW(analyze_causal_factors(ucas, {{"F1", "U9", "f", "s"}}), InvariantError);
}

TEST(Concept, EmptyAnalysisRejected) {
  EXPECT_THROW(emit_safety_concept(minimal_base(), {}, {}, {}), CompletenessError);
}

TEST(Concept, FactorlessUcaBlocksEmission) {
  const Analysis a = analyze(load_model_file(kIncomplete));
  try {
    emit_safety_concept(a.base, a.events, a.ucas, a.factors);
    FAIL();
  } catch (const CompletenessError& e) {
    ASSERT_EQ(e.problems().size(), 1u);
    EXPECT_NE(e.problems()[0].find("UCA2"), std::string::npos);
  }
}

TEST(Concept, FixtureCountsAndMaxAsil) {
  const Analysis a = analyze(load_model_file(kFixture));
  const SafetyConcept sc = emit_safety_concept(a.base, a.events, a.ucas, a.factors);
  EXPECT_EQ(sc.goals.size(), a.events.size());
  EXPECT_EQ(sc.requirements.size(), a.ucas.size());
  EXPECT_EQ(sc.mitigations.size(), a.factors.size());
  for (const auto& r : sc.requirements) {
    Asil expected = Asil::QM;
    for (const auto& e : a.events)
      if (std::find(r.hazard_ids.begin(), r.hazard_ids.end(), e.hazard_id) != r.hazard_ids.end())
        expected = std::max(expected, e.asil);
    EXPECT_EQ(r.asil, expected);
  }
  EXPECT_EQ(sc.requirements[0].asil, Asil::D);
  EXPECT_TRUE(traceability_gaps(sc, a.base, a.ucas).empty());
}

TEST(Concept, TraceabilityDetectsBrokenChain) {
  const Analysis a = analyze(load_model_file(kFixture));
  SafetyConcept sc = emit_safety_concept(a.base, a.events, a.ucas, a.factors);
  sc.requirements[0].uca_id = "UCA404";
  EXPECT_FALSE(traceability_gaps(sc, a.base, a.ucas).empty());
}

TEST(Concept, DocumentsAreDeterministic) {
  const Model m = load_model_file(kFixture);
  const Analysis a = analyze(m), b = analyze(m);
  EXPECT_EQ(to_json(emit_safety_concept(a.base, a.events, a.ucas, a.factors)),
            to_json(emit_safety_concept(b.base, b.events, b.ucas, b.factors)));
  EXPECT_EQ(to_json(a.events), to_json(b.events));
  EXPECT_EQ(to_json(a.item), to_json(b.item));
}

TEST(ModelFile, RejectsUnknownSection) {
  Json j = Json::parse(std::ifstream(kFixture));
  j["extras"] = Json::array();
  try {
    parse_model(j.dump());
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.where(), "/extras");
  }
}

TEST(ModelFile, RejectsBadClassString) {
  Json j = Json::parse(std::ifstream(kFixture));
  j["classifications"][0]["severity"] = "S9";
  try {
    parse_model(j.dump());
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.where(), "/classifications/0/severity");
  }
}

TEST(ModelFile, RejectsUnknownUcaType) {
  Json j = Json::parse(std::ifstream(kFixture));
  j["ucas"][0]["type"] = "Sometimes";
  EXPECT_THROW(parse_model(j.dump()), ParseError);
}

}  // namespace
}  // namespace avcert
