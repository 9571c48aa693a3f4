#include "avcert/pipeline.hpp"

#include <algorithm>

namespace avcert::pipeline {

namespace {

using A = Actor;
using M = Method;

std::vector<StageDef> build_table() {
  return {
      {1, "requirements definition", {A::Manufacturer}, {M::RSS, M::PEGASUS},
       {"requirements-specification"}},
      {2, "concept design", {A::Manufacturer}, {M::PEGASUS}, {"concept-design-dossier"}},
      {3, "hardware infrastructure", {A::Manufacturer, A::SubsystemProvider}, {M::RSS, M::PEGASUS},
       {"hardware-design-dossier"}},
      {4, "software infrastructure", {A::Manufacturer, A::SubsystemProvider}, {M::RSS, M::PEGASUS},
       {"software-design-dossier"}},
      {5, "design verification (simulation and analysis)", {A::Manufacturer, A::RiskAssessmentBody},
       {M::STPA, M::PEGASUS}, {"simulation-report", "hazard-analysis"}},
      {6, "prototype production", {A::Manufacturer, A::SubsystemProvider}, {M::PEGASUS},
       {"prototype-build-record"}},
      {7, "field & laboratory type tests", {A::TestCenter, A::ConformityBody}, {M::PEGASUS},
       {"type-test-report"}},
      {8, "conformity certification", {A::ConformityBody}, {M::PEGASUS},
       {"conformity-certificate", "legislation-compliance-certificate"}},
      {9, "type approval", {A::Manufacturer, A::Authority}, {M::PEGASUS},
       {"type-approval-application", "type-approval-certificate"}},
      {10, "series production", {A::Manufacturer}, {}, {"production-conformity-record"}},
      {11, "routine tests", {A::Manufacturer, A::TestCenter}, {}, {"routine-test-record"}},
      {12, "licensing", {A::Manufacturer, A::Authority}, {}, {"vehicle-license"}},
  };
}

bool has_kind(const std::vector<std::string>& kinds, const std::string& k) {
  return std::find(kinds.begin(), kinds.end(), k) != kinds.end();
}

// Unit stage (10..12) whose required evidence is `kind`, or 0.
int unit_stage_of(const std::string& kind) {
  for (int s = kSeriesProductionStage; s <= kStageCount; ++s)
    if (has_kind(stage(s).required_evidence, kind)) return s;
  return 0;
}

bool unit_has(const Project& p, const std::string& unit, const std::string& kind) {
  return std::any_of(p.unit_evidence.begin(), p.unit_evidence.end(), [&](const UnitEvidence& e) {
    return e.unit_id == unit && !e.record.supplementary && e.record.kind == kind;
  });
}

UnitCycle& unit_slot(Project& p, const std::string& id) {
  for (auto& u : p.units)
    if (u.unit_id == id) return u;
  p.units.push_back({id, false, false, false});
  return p.units.back();
}

void check_project_evidence(const Project& p, const EvidenceRecord& r) {
  if (r.kind.empty()) throw InvariantError("evidence kind must be nonempty");
  if (r.stage_index != p.current_stage)
    throw InvariantError("evidence for stage " + std::to_string(r.stage_index) +
                         " submitted at stage " + std::to_string(p.current_stage));
  if (r.supplementary) return;
  if (p.current_stage >= kSeriesProductionStage)
    throw InvariantError("evidence '" + r.kind + "' belongs to a unit cycle from stage 10 on");
  if (!has_kind(stage(p.current_stage).required_evidence, r.kind))
    throw InvariantError("evidence kind '" + r.kind + "' is not required at stage " +
                         std::to_string(p.current_stage) + "; mark it supplementary");
}

void check_unit_evidence(const Project& p, const std::string& unit, const EvidenceRecord& r) {
  if (p.current_stage < kSeriesProductionStage)
    throw GateRefusal("unit cycles start after type approval (project is at stage " +
                      std::to_string(p.current_stage) + ")");
  if (unit.empty()) throw InvariantError("unit id must be nonempty");
  if (r.kind.empty()) throw InvariantError("evidence kind must be nonempty");
  if (r.supplementary) return;
  const int s = unit_stage_of(r.kind);
  if (s == 0)
    throw InvariantError("evidence kind '" + r.kind + "' is not part of the unit cycle");
  if (r.stage_index != s)
    throw InvariantError("evidence '" + r.kind + "' belongs to stage " + std::to_string(s));
}

}  // namespace

const char* to_string(Actor a) {
  switch (a) {
    case Actor::Manufacturer: return "Manufacturer";
    case Actor::SubsystemProvider: return "SubsystemProvider";
    case Actor::TestCenter: return "TestCenter";
    case Actor::ConformityBody: return "ConformityBody";
    case Actor::Authority: return "Authority";
    case Actor::RiskAssessmentBody: return "RiskAssessmentBody";
  }
  return "?";
}

const char* to_string(Method m) {
  switch (m) {
    case Method::RSS: return "RSS";
    case Method::STPA: return "STPA";
    case Method::PEGASUS: return "PEGASUS";
  }
  return "?";
}

const char* to_string(Phase p) {
  switch (p) {
    case Phase::DataProcessing: return "DataProcessing";
    case Phase::RequirementsDefinition: return "RequirementsDefinition";
    case Phase::Database: return "Database";
    case Phase::Evaluation: return "Evaluation";
    case Phase::Argumentation: return "Argumentation";
  }
  return "?";
}

const char* to_string(Layer l) {
  switch (l) {
    case Layer::Structure: return "structure";
    case Layer::Formalization: return "formalization";
    case Layer::Consistency: return "consistency";
    case Layer::Completeness: return "completeness";
    case Layer::Conformity: return "conformity";
  }
  return "?";
}

std::optional<Layer> layer_from_string(const std::string& s) {
  for (Layer l : kLayers)
    if (s == to_string(l)) return l;
  return std::nullopt;
}

const char* to_string(Event::Type t) {
  switch (t) {
    case Event::Type::Evidence: return "evidence";
    case Event::Type::Advance: return "advance";
    case Event::Type::Rollback: return "rollback";
    case Event::Type::UnitEvidence: return "unit-evidence";
    case Event::Type::UnitStage: return "unit-stage";
    case Event::Type::PegasusStep: return "pegasus-step";
    case Event::Type::PegasusLayer: return "pegasus-layer";
  }
  return "?";
}

const std::vector<StageDef>& stage_table() {
  static const std::vector<StageDef> table = build_table();
  return table;
}

const StageDef& stage(int index) {
  if (index < 1 || index > kStageCount)
    throw InvariantError("stage index " + std::to_string(index) + " outside 1..12");
  return stage_table()[static_cast<std::size_t>(index - 1)];
}

std::set<Phase> pegasus_phase(int step) {
  if (step < 1 || step > 20)
    throw InvariantError("PEGASUS step " + std::to_string(step) + " outside 1..20");
  if (step == 1) return {Phase::DataProcessing, Phase::RequirementsDefinition};
  if (step == 2 || step == 4 || step == 5) return {Phase::DataProcessing};
  if (step == 3 || step == 6) return {Phase::RequirementsDefinition};
  if (step <= 11) return {Phase::Database};
  if (step <= 19) return {Phase::Evaluation};
  return {Phase::Argumentation};
}

bool PegasusStatus::steps_1_to_19_done() const {
  for (int s = 1; s <= 19; ++s)
    if (!completed_steps.count(s)) return false;
  return true;
}

const UnitCycle* Project::unit(const std::string& uid) const {
  for (const auto& u : units)
    if (u.unit_id == uid) return &u;
  return nullptr;
}

Project create_project(const std::string& id) {
  if (id.empty()) throw InvariantError("project id must be nonempty");
  Project p;
  p.id = id;
  return p;
}

std::vector<std::string> missing_evidence(const Project& p, int stage_index) {
  std::vector<std::string> missing;
  for (const auto& kind : stage(stage_index).required_evidence) {
    const bool present = std::any_of(p.evidence.begin(), p.evidence.end(), [&](const EvidenceRecord& r) {
      return !r.supplementary && r.stage_index == stage_index && r.kind == kind;
    });
    if (!present) missing.push_back(kind);
  }
  return missing;
}

void apply_event(Project& p, const Event& e) {
  using T = Event::Type;
  switch (e.type) {
    case T::Evidence:
      check_project_evidence(p, e.evidence);
      p.evidence.push_back(e.evidence);
      break;
    case T::Advance: {
      if (e.from != p.current_stage || e.to != e.from + 1)
        throw InvariantError("advance must go from the current stage to the next one");
      if (p.current_stage > kTypeApprovalStage)
        throw GateRefusal("stage " + std::to_string(p.current_stage) +
                          " is terminal for the project; stages 10 to 12 run per unit");
      const auto missing = missing_evidence(p, p.current_stage);
      if (!missing.empty())
        throw GateRefusal("stage " + std::to_string(p.current_stage) + " is missing '" +
                          missing.front() + "'");
      p.current_stage = e.to;
      break;
    }
    case T::Rollback:
      if (e.from != p.current_stage || e.to < 1 || e.to >= p.current_stage)
        throw InvariantError("rollback must target an earlier stage");
      if (!p.units.empty()) throw GateRefusal("cannot roll back once unit cycles exist");
      p.current_stage = e.to;
      break;
    case T::UnitEvidence:
      check_unit_evidence(p, e.unit_id, e.evidence);
      unit_slot(p, e.unit_id);
      p.unit_evidence.push_back({e.unit_id, e.evidence});
      break;
    case T::UnitStage: {
      if (p.current_stage < kSeriesProductionStage)
        throw GateRefusal("unit cycles start after type approval");
      const UnitCycle* existing = p.unit(e.unit_id);
      if (!existing) throw InvariantError("unknown unit '" + e.unit_id + "'");
      if (e.to < 10 || e.to > 12) throw InvariantError("unit stage must be 10, 11 or 12");
      const std::string& needed = stage(e.to).required_evidence.front();
      if (e.to == 10 && existing->produced) throw InvariantError("unit already produced");
      if (e.to == 11 && (!existing->produced || existing->routine_tested))
        throw GateRefusal("routine tests need a produced, untested unit");
      if (e.to == 12 && (!existing->routine_tested || existing->licensed))
        throw GateRefusal("licensing needs a routine-tested, unlicensed unit");
      if (!unit_has(p, e.unit_id, needed))
        throw GateRefusal("unit '" + e.unit_id + "' is missing '" + needed + "'");
      UnitCycle& u = unit_slot(p, e.unit_id);
      (e.to == 10 ? u.produced : e.to == 11 ? u.routine_tested : u.licensed) = true;
      break;
    }
    case T::PegasusStep:
      if (e.step < 1 || e.step > 19)
        throw InvariantError("only steps 1..19 are completed directly");
      if (p.pegasus.completed_steps.count(e.step))
        throw InvariantError("step " + std::to_string(e.step) + " already complete");
      p.pegasus.completed_steps.insert(e.step);
      break;
    case T::PegasusLayer:
      if (!p.pegasus.steps_1_to_19_done())
        throw GateRefusal("argumentation layers need steps 1-19 complete");
      if (p.pegasus.layers_done.count(e.layer))
        throw InvariantError(std::string("layer ") + to_string(e.layer) + " already done");
      p.pegasus.layers_done.insert(e.layer);
      if (p.pegasus.layers_done.size() == kLayers.size()) p.pegasus.completed_steps.insert(20);
      break;
  }
  p.history.push_back(e);
}

AdvanceResult advance_stage(Project& p, const std::vector<EvidenceRecord>& batch) {
  if (p.current_stage > kTypeApprovalStage)
    throw GateRefusal("stage " + std::to_string(p.current_stage) +
                      " is terminal for the project; stages 10 to 12 run per unit");
  std::vector<Event> events;
  for (EvidenceRecord r : batch) {
    r.stage_index = p.current_stage;
    check_project_evidence(p, r);
    Event e;
    e.type = Event::Type::Evidence;
    e.evidence = std::move(r);
    events.push_back(std::move(e));
  }
  for (const auto& e : events) apply_event(p, e);

  AdvanceResult result;
  result.deficiencies = missing_evidence(p, p.current_stage);
  if (!result.deficiencies.empty()) return result;
  Event adv;
  adv.type = Event::Type::Advance;
  adv.from = p.current_stage;
  adv.to = p.current_stage + 1;
  apply_event(p, adv);
  result.advanced = true;
  return result;
}

UnitResult record_unit_cycle(Project& p, const std::string& unit_id,
                             const std::vector<EvidenceRecord>& batch) {
  if (p.current_stage < kSeriesProductionStage)
    throw GateRefusal("unit cycles start after type approval (project is at stage " +
                      std::to_string(p.current_stage) + ")");
  std::vector<Event> events;
  for (EvidenceRecord r : batch) {
    if (!r.supplementary) r.stage_index = unit_stage_of(r.kind);
    else if (r.stage_index == 0) r.stage_index = p.current_stage;
    check_unit_evidence(p, unit_id, r);
    Event e;
    e.type = Event::Type::UnitEvidence;
    e.unit_id = unit_id;
    e.evidence = std::move(r);
    events.push_back(std::move(e));
  }
  for (const auto& e : events) apply_event(p, e);

  UnitResult result;
  for (int s = kSeriesProductionStage; s <= kStageCount; ++s) {
    const UnitCycle* u = p.unit(unit_id);
    const bool done = u && (s == 10 ? u->produced : s == 11 ? u->routine_tested : u->licensed);
    if (done) continue;
    const std::string& needed = stage(s).required_evidence.front();
    if (!u || !unit_has(p, unit_id, needed)) {
      result.deficiencies.push_back("stage " + std::to_string(s) + " needs '" + needed + "'");
      // Later stages' evidence cannot count before this one passes.
      for (int later = s + 1; later <= kStageCount; ++later)
        if (u && unit_has(p, unit_id, stage(later).required_evidence.front()))
          result.deficiencies.push_back("stage " + std::to_string(later) + " refused until stage " +
                                        std::to_string(s) + " passes");
      break;
    }
    Event e;
    e.type = Event::Type::UnitStage;
    e.unit_id = unit_id;
    e.to = s;
    apply_event(p, e);
  }
  if (const UnitCycle* u = p.unit(unit_id)) result.unit = *u;
  else result.unit.unit_id = unit_id;
  return result;
}

void rollback(Project& p, int to_stage) {
  Event e;
  e.type = Event::Type::Rollback;
  e.from = p.current_stage;
  e.to = to_stage;
  apply_event(p, e);
}

bool complete_pegasus_step(Project& p, int step) {
  if (step < 1 || step > 20)
    throw InvariantError("PEGASUS step " + std::to_string(step) + " outside 1..20");
  if (p.pegasus.completed_steps.count(step)) return false;
  if (step == 20)
    throw GateRefusal(p.pegasus.steps_1_to_19_done()
                          ? "step 20 completes when all five argumentation layers are done"
                          : "step 20 needs steps 1-19 complete and all argumentation layers done");
  Event e;
  e.type = Event::Type::PegasusStep;
  e.step = step;
  apply_event(p, e);
  return true;
}

bool mark_argumentation_layer(Project& p, Layer layer) {
  if (p.pegasus.layers_done.count(layer)) return false;
  Event e;
  e.type = Event::Type::PegasusLayer;
  e.layer = layer;
  apply_event(p, e);
  return true;
}

std::vector<std::pair<Layer, bool>> argumentation_checklist(const Project& p) {
  std::vector<std::pair<Layer, bool>> out;
  for (Layer l : kLayers) out.emplace_back(l, p.pegasus.layers_done.count(l) > 0);
  return out;
}

std::vector<int> no_skip_violations(const Project& p) {
  std::vector<int> out;
  for (int s = 1; s < p.current_stage && s <= kTypeApprovalStage; ++s)
    if (!missing_evidence(p, s).empty()) out.push_back(s);
  return out;
}

Project replay(const std::string& id, const std::vector<Event>& events) {
  Project p = create_project(id);
  for (const auto& e : events) apply_event(p, e);
  return p;
}

}  // namespace avcert::pipeline
