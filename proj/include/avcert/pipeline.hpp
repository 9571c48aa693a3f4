#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "avcert/errors.hpp"

namespace avcert::pipeline {

enum class Actor { Manufacturer, SubsystemProvider, TestCenter, ConformityBody, Authority, RiskAssessmentBody };
enum class Method { RSS, STPA, PEGASUS };

const char* to_string(Actor a);
const char* to_string(Method m);

inline constexpr int kStageCount = 12;
inline constexpr int kTypeApprovalStage = 9;
inline constexpr int kSeriesProductionStage = 10;

struct StageDef {
  int index = 0;
  std::string name;
  std::vector<Actor> actors;
  std::vector<Method> methods;
  std::vector<std::string> required_evidence;
};

/// The shipped 12-stage table, ordered by index.
const std::vector<StageDef>& stage_table();
const StageDef& stage(int index);

/// A legal request the current state does not allow (a gate said no).
class GateRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvidenceRecord {
  std::string kind;
  int stage_index = 0;
  std::string reference;
  std::string timestamp;
  bool supplementary = false;  // accepted at any stage, never satisfies a gate
};

/// Per-unit production loop (stages 10, 11, 12).
struct UnitCycle {
  std::string unit_id;
  bool produced = false;
  bool routine_tested = false;
  bool licensed = false;
};

enum class Phase { DataProcessing, RequirementsDefinition, Database, Evaluation, Argumentation };
enum class Layer { Structure, Formalization, Consistency, Completeness, Conformity };

inline constexpr std::array<Layer, 5> kLayers{Layer::Structure, Layer::Formalization,
                                              Layer::Consistency, Layer::Completeness,
                                              Layer::Conformity};

const char* to_string(Phase p);
const char* to_string(Layer l);
std::optional<Layer> layer_from_string(const std::string& s);

/// Phases a PEGASUS step belongs to. Throws InvariantError outside 1..20.
std::set<Phase> pegasus_phase(int step);

struct PegasusStatus {
  std::set<int> completed_steps;
  std::set<Layer> layers_done;

  bool steps_1_to_19_done() const;
};

/// One entry of the append-only history. State is the fold of these.
struct Event {
  enum class Type { Evidence, Advance, Rollback, UnitEvidence, UnitStage, PegasusStep, PegasusLayer };

  Type type = Type::Evidence;
  EvidenceRecord evidence;  // Evidence, UnitEvidence
  std::string unit_id;      // UnitEvidence, UnitStage
  int from = 0;             // Advance, Rollback
  int to = 0;               // Advance, Rollback, UnitStage (10..12)
  int step = 0;             // PegasusStep
  Layer layer = Layer::Structure;  // PegasusLayer
};

const char* to_string(Event::Type t);

struct UnitEvidence {
  std::string unit_id;
  EvidenceRecord record;
};

struct Project {
  std::string id;
  int current_stage = 1;
  std::vector<EvidenceRecord> evidence;
  std::vector<UnitCycle> units;
  std::vector<UnitEvidence> unit_evidence;
  PegasusStatus pegasus;
  std::vector<Event> history;

  const UnitCycle* unit(const std::string& id) const;
};

Project create_project(const std::string& id);

/// Applies one event after checking it is legal in the current state, then
/// appends it to the history. Throws InvariantError or GateRefusal.
void apply_event(Project& project, const Event& event);

struct AdvanceResult {
  bool advanced = false;
  std::vector<std::string> deficiencies;  // missing evidence kinds, when refused
};

/// Records the evidence batch against the current stage, then advances if the
/// stage's required evidence is complete. Evidence of a kind the stage does
/// not require is rejected unless marked supplementary.
AdvanceResult advance_stage(Project& project, const std::vector<EvidenceRecord>& batch);

/// Required evidence kinds of the current stage not yet on file.
std::vector<std::string> missing_evidence(const Project& project, int stage_index);

struct UnitResult {
  UnitCycle unit;
  std::vector<std::string> deficiencies;
};

/// Records unit evidence and moves the unit through production (10), routine
/// tests (11) and licensing (12) as far as its evidence allows.
UnitResult record_unit_cycle(Project& project, const std::string& unit_id,
                             const std::vector<EvidenceRecord>& batch);

/// Rework: return to an earlier stage, keeping all evidence on file.
void rollback(Project& project, int to_stage);

/// Returns false when the step was already complete.
bool complete_pegasus_step(Project& project, int step);
/// Returns false when the layer was already done. Completing the last layer
/// completes step 20.
bool mark_argumentation_layer(Project& project, Layer layer);

std::vector<std::pair<Layer, bool>> argumentation_checklist(const Project& project);

/// Stages below the current one whose required evidence is incomplete.
std::vector<int> no_skip_violations(const Project& project);

// Persistence: {"id", "events": [...]}; loading replays the events.
std::string to_json(const Project& project);
Project from_json(const std::string& text);
Project replay(const std::string& id, const std::vector<Event>& events);
/// Derived state (not the history) as JSON, for status output and comparison.
std::string state_json(const Project& project);

Project load_file(const std::string& path);
void save_file(const Project& project, const std::string& path);

}  // namespace avcert::pipeline
