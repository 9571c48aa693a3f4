#pragma once

#include <array>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "avcert/errors.hpp"

namespace avcert::stpa {

enum class LossCategory { Human, Property, Environment, Mission };

const char* to_string(LossCategory c);
std::optional<LossCategory> loss_category_from_string(const std::string& s);

struct Accident {
  std::string id;
  std::string description;
  std::set<LossCategory> loss_categories;
};

struct Hazard {
  std::string id;
  std::string description;
  std::vector<std::string> linked_accidents;
  std::string worst_case_environment;
};

struct SafetyConstraint {
  std::string id;
  std::string hazard_id;
  std::string statement;
};

struct Node {
  std::string id;
  std::string name;
};

struct ControlAction {
  std::string id;
  std::string controller;
  std::string process;
  std::string name;
};

struct Feedback {
  std::string id;
  std::string process;
  std::string controller;
  std::string name;
};

struct ControlStructure {
  std::vector<Node> controllers;
  std::vector<Node> processes;
  std::vector<ControlAction> control_actions;
  std::vector<Feedback> feedback;
};

struct OperationalSituation {
  std::string id;
  std::string description;
  std::string operating_mode;
};

enum class Asil { QM, A, B, C, D };

const char* to_string(Asil a);
std::optional<Asil> asil_from_string(const std::string& s);

/// User judgement of one (hazard, situation) pair. Classes are S0..S3,
/// E0..E4, C0..C3.
struct Classification {
  std::string hazard_id;
  std::string situation_id;
  int severity = 0;
  int exposure = 0;
  int controllability = 0;
  std::string rationale;
  std::optional<std::string> safety_goal;
};

struct HazardousEvent {
  std::string id;  // "HE-<hazard>-<situation>"
  std::string hazard_id;
  std::string situation_id;
  int severity = 0;
  int exposure = 0;
  int controllability = 0;
  Asil asil = Asil::QM;
  std::string safety_goal;
};

enum class UcaType { NotProvided, ProvidedCausesHazard, WrongTimingOrder, StoppedTooSoonAppliedTooLong };

inline constexpr std::array<UcaType, 4> kUcaTypes{
    UcaType::NotProvided, UcaType::ProvidedCausesHazard, UcaType::WrongTimingOrder,
    UcaType::StoppedTooSoonAppliedTooLong};

const char* to_string(UcaType t);
std::optional<UcaType> uca_type_from_string(const std::string& s);

/// One row of the UCA worksheet as filled in by the analyst.
struct UcaWorksheetRow {
  std::string id;
  std::string control_action_id;
  UcaType type = UcaType::NotProvided;
  std::string context;
  std::vector<std::string> linked_hazards;
  bool confirmed = false;
};

struct UnsafeControlAction {
  std::string id;
  std::string control_action_id;
  UcaType type = UcaType::NotProvided;
  std::string context;
  std::vector<std::string> linked_hazards;
};

struct CausalFactor {
  std::string id;
  std::string uca_id;
  std::string factor;
  std::string unsafe_scenario;
};

/// Total map S1..S3 x E1..E4 x C1..C3 -> ASIL; any class-0 coordinate is QM.
class AsilTable {
 public:
  /// Validates totality and monotonicity; throws InvariantError otherwise.
  static AsilTable from_entries(std::string name,
                                const std::vector<std::array<int, 3>>& keys,
                                const std::vector<Asil>& values);
  /// The shipped default table.
  static const AsilTable& default_table();

  Asil lookup(int severity, int exposure, int controllability) const;
  const std::string& name() const { return name_; }

 private:
  AsilTable() = default;
  std::string name_;
  // [s-1][e-1][c-1]
  std::array<std::array<std::array<Asil, 3>, 4>, 3> cells_{};
};

AsilTable load_asil_table(const std::string& json_text);
AsilTable load_asil_table_file(const std::string& path);

/// Output of STPA step 0; only produced by step0_fundamentals.
struct AnalysisBase {
  std::vector<Accident> accidents;
  std::vector<Hazard> hazards;
  std::vector<SafetyConstraint> constraints;
  ControlStructure structure;

  const Hazard* hazard(const std::string& id) const;
  const ControlAction* control_action(const std::string& id) const;
};

AnalysisBase step0_fundamentals(std::vector<Accident> accidents, std::vector<Hazard> hazards,
                                std::vector<SafetyConstraint> constraints,
                                ControlStructure structure);

struct ItemInfo {
  std::string name = "item";
  std::string purpose;
  /// Structure element ids inside the item; unset means every controller.
  std::optional<std::vector<std::string>> inside;
};

struct FunctionalRequirement {
  std::string id;
  std::string control_action_id;
  std::string text;
};

struct ItemDefinition {
  std::string name;
  std::string purpose;
  std::vector<std::string> inside;
  std::vector<std::string> outside;
  std::vector<FunctionalRequirement> functional_requirements;
};

ItemDefinition derive_item_definition(const AnalysisBase& base, const ItemInfo& info = {});

Asil asil_lookup(int severity, int exposure, int controllability,
                 const AsilTable& table = AsilTable::default_table());

std::vector<HazardousEvent> run_hara(const AnalysisBase& base,
                                     const std::vector<OperationalSituation>& situations,
                                     const std::vector<Classification>& classifications,
                                     const AsilTable& table = AsilTable::default_table());

struct UcaCandidate {
  std::string control_action_id;
  UcaType type = UcaType::NotProvided;
};

/// Control actions x UCA types, in structure order.
std::vector<UcaCandidate> uca_candidate_grid(const AnalysisBase& base);

std::vector<UnsafeControlAction> identify_ucas(const AnalysisBase& base,
                                               const std::vector<HazardousEvent>& events,
                                               const std::vector<UcaWorksheetRow>& rows);

std::vector<CausalFactor> analyze_causal_factors(const std::vector<UnsafeControlAction>& ucas,
                                                 const std::vector<CausalFactor>& entries);

/// Every reason the safety concept cannot be emitted yet; empty when complete.
std::vector<std::string> completeness_report(const std::vector<HazardousEvent>& events,
                                             const std::vector<UnsafeControlAction>& ucas,
                                             const std::vector<CausalFactor>& factors);

class CompletenessError : public std::runtime_error {
 public:
  explicit CompletenessError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct SafetyGoal {
  std::string event_id;
  std::string hazard_id;
  std::string situation_id;
  Asil asil = Asil::QM;
  std::string text;
};

struct SafetyRequirement {
  std::string id;  // "SR-<uca id>"
  std::string uca_id;
  std::vector<std::string> hazard_ids;
  Asil asil = Asil::QM;
  std::string text;
};

struct Mitigation {
  std::string factor_id;
  std::string uca_id;
  std::string text;
};

struct SafetyConcept {
  std::vector<SafetyGoal> goals;
  std::vector<SafetyRequirement> requirements;
  std::vector<Mitigation> mitigations;
};

/// Throws CompletenessError listing every gap; nothing is emitted then.
SafetyConcept emit_safety_concept(const AnalysisBase& base,
                                  const std::vector<HazardousEvent>& events,
                                  const std::vector<UnsafeControlAction>& ucas,
                                  const std::vector<CausalFactor>& factors);

/// Broken links of the requirement -> UCA -> hazard -> accident chain.
std::vector<std::string> traceability_gaps(const SafetyConcept& safety_concept,
                                           const AnalysisBase& base,
                                           const std::vector<UnsafeControlAction>& ucas);

// Model file: sections item, accidents, hazards, constraints, control_structure,
// situations, classifications, ucas, causal_factors.
struct Model {
  ItemInfo item;
  std::vector<Accident> accidents;
  std::vector<Hazard> hazards;
  std::vector<SafetyConstraint> constraints;
  ControlStructure structure;
  std::vector<OperationalSituation> situations;
  std::vector<Classification> classifications;
  std::vector<UcaWorksheetRow> ucas;
  std::vector<CausalFactor> causal_factors;
};

Model parse_model(const std::string& json_text);
Model load_model_file(const std::string& path);

/// All eight steps up to the causal factors.
struct Analysis {
  AnalysisBase base;
  ItemDefinition item;
  std::vector<HazardousEvent> events;
  std::vector<UnsafeControlAction> ucas;
  std::vector<CausalFactor> factors;
};

Analysis analyze(const Model& model, const AsilTable& table = AsilTable::default_table());

// Documents. JSON output is deterministic (ordered by id).
std::string to_json(const ItemDefinition& item);
std::string to_json(const std::vector<HazardousEvent>& events);
std::string uca_grid_json(const AnalysisBase& base, const std::vector<UcaWorksheetRow>& rows);
std::string to_json(const SafetyConcept& safety_concept);
std::string report(const SafetyConcept& safety_concept, const Analysis& analysis);

}  // namespace avcert::stpa
