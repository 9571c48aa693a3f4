#include "avcert/stpa.hpp"

#include <algorithm>
#include <map>

namespace avcert::stpa {

namespace {

template <class T>
void require_unique_ids(const std::vector<T>& items, const std::string& what) {
  std::set<std::string> seen;
  for (const auto& x : items) {
    if (x.id.empty()) throw InvariantError(what + " with an empty id");
    if (!seen.insert(x.id).second) throw InvariantError("duplicate " + what + " id '" + x.id + "'");
  }
}

template <class T>
void sort_by_id(std::vector<T>& items) {
  std::sort(items.begin(), items.end(), [](const T& a, const T& b) { return a.id < b.id; });
}

template <class T>
bool contains_id(const std::vector<T>& items, const std::string& id) {
  return std::any_of(items.begin(), items.end(), [&](const T& x) { return x.id == id; });
}

const Node* find_node(const std::vector<Node>& nodes, const std::string& id) {
  for (const auto& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

std::string requirement_text(const ControlAction& action, const Node& controller,
                             const UnsafeControlAction& uca) {
  const std::string who = controller.name;
  const std::string what = "'" + action.name + "'";
  const std::string when = uca.context.empty() ? "" : " when " + uca.context;
  switch (uca.type) {
    case UcaType::NotProvided: return who + " shall provide " + what + when + ".";
    case UcaType::ProvidedCausesHazard: return who + " shall not provide " + what + when + ".";
    case UcaType::WrongTimingOrder:
      return who + " shall provide " + what + " at the correct time and in the correct order" +
             when + ".";
    case UcaType::StoppedTooSoonAppliedTooLong:
      return who + " shall apply " + what + " for exactly the required duration" + when + ".";
  }
  return {};
}

}  // namespace

const char* to_string(LossCategory c) {
  switch (c) {
    case LossCategory::Human: return "human";
    case LossCategory::Property: return "property";
    case LossCategory::Environment: return "environment";
    case LossCategory::Mission: return "mission";
  }
  return "?";
}

std::optional<LossCategory> loss_category_from_string(const std::string& s) {
  for (auto c : {LossCategory::Human, LossCategory::Property, LossCategory::Environment,
                 LossCategory::Mission})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

const char* to_string(Asil a) {
  switch (a) {
    case Asil::QM: return "QM";
    case Asil::A: return "A";
    case Asil::B: return "B";
    case Asil::C: return "C";
    case Asil::D: return "D";
  }
  return "?";
}

std::optional<Asil> asil_from_string(const std::string& s) {
  for (auto a : {Asil::QM, Asil::A, Asil::B, Asil::C, Asil::D})
    if (s == to_string(a)) return a;
  return std::nullopt;
}

const char* to_string(UcaType t) {
  switch (t) {
    case UcaType::NotProvided: return "NotProvided";
    case UcaType::ProvidedCausesHazard: return "ProvidedCausesHazard";
    case UcaType::WrongTimingOrder: return "WrongTimingOrder";
    case UcaType::StoppedTooSoonAppliedTooLong: return "StoppedTooSoonAppliedTooLong";
  }
  return "?";
}

std::optional<UcaType> uca_type_from_string(const std::string& s) {
  for (auto t : kUcaTypes)
    if (s == to_string(t)) return t;
  return std::nullopt;
}

AsilTable AsilTable::from_entries(std::string name, const std::vector<std::array<int, 3>>& keys,
                                  const std::vector<Asil>& values) {
  if (keys.size() != values.size()) throw InvariantError("ASIL table: key/value count mismatch");
  AsilTable t;
  t.name_ = std::move(name);
  std::array<std::array<std::array<bool, 3>, 4>, 3> seen{};
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto [s, e, c] = keys[i];
    if (s < 1 || s > 3 || e < 1 || e > 4 || c < 1 || c > 3)
      throw InvariantError("ASIL table: entry (S" + std::to_string(s) + ",E" + std::to_string(e) +
                           ",C" + std::to_string(c) + ") is outside S1-S3 x E1-E4 x C1-C3");
    bool& cell = seen[s - 1][e - 1][c - 1];
    if (cell)
      throw InvariantError("ASIL table: duplicate entry (S" + std::to_string(s) + ",E" +
                           std::to_string(e) + ",C" + std::to_string(c) + ")");
    cell = true;
    t.cells_[s - 1][e - 1][c - 1] = values[i];
  }
  if (keys.size() != 36) throw InvariantError("ASIL table: expected 36 entries, got " +
                                              std::to_string(keys.size()));
  for (int s = 1; s <= 3; ++s)
    for (int e = 1; e <= 4; ++e)
      for (int c = 1; c <= 3; ++c) {
        const Asil here = t.lookup(s, e, c);
        const std::array<std::array<int, 3>, 3> ups{{{s + 1, e, c}, {s, e + 1, c}, {s, e, c + 1}}};
        for (const auto& [s2, e2, c2] : ups) {
          if (s2 > 3 || e2 > 4 || c2 > 3) continue;
          if (t.lookup(s2, e2, c2) < here)
            throw InvariantError("ASIL table: not monotone between (S" + std::to_string(s) +
                                 ",E" + std::to_string(e) + ",C" + std::to_string(c) + ") and (S" +
                                 std::to_string(s2) + ",E" + std::to_string(e2) + ",C" +
                                 std::to_string(c2) + ")");
        }
      }
  return t;
}

Asil AsilTable::lookup(int s, int e, int c) const {
  if (s < 0 || s > 3 || e < 0 || e > 4 || c < 0 || c > 3)
    throw InvariantError("classification out of range: S" + std::to_string(s) + " E" +
                         std::to_string(e) + " C" + std::to_string(c));
  if (s == 0 || e == 0 || c == 0) return Asil::QM;
  return cells_[s - 1][e - 1][c - 1];
}

Asil asil_lookup(int s, int e, int c, const AsilTable& table) { return table.lookup(s, e, c); }

const Hazard* AnalysisBase::hazard(const std::string& id) const {
  for (const auto& h : hazards)
    if (h.id == id) return &h;
  return nullptr;
}

const ControlAction* AnalysisBase::control_action(const std::string& id) const {
  for (const auto& a : structure.control_actions)
    if (a.id == id) return &a;
  return nullptr;
}

AnalysisBase step0_fundamentals(std::vector<Accident> accidents, std::vector<Hazard> hazards,
                                std::vector<SafetyConstraint> constraints,
                                ControlStructure structure) {
  require_unique_ids(accidents, "accident");
  require_unique_ids(hazards, "hazard");
  require_unique_ids(constraints, "constraint");
  for (const auto& a : accidents)
    if (a.loss_categories.empty())
      throw InvariantError("accident '" + a.id + "' has no loss category");
  for (const auto& h : hazards) {
    if (h.linked_accidents.empty())
      throw InvariantError("hazard '" + h.id + "' is not linked to any accident");
    for (const auto& a : h.linked_accidents)
      if (!contains_id(accidents, a))
        throw InvariantError("hazard '" + h.id + "' links unknown accident '" + a + "'");
  }
  for (const auto& c : constraints)
    if (!contains_id(hazards, c.hazard_id))
      throw InvariantError("constraint '" + c.id + "' references unknown hazard '" + c.hazard_id +
                           "'");

  const ControlStructure& cs = structure;
  if (cs.controllers.empty()) throw InvariantError("control structure has no controller");
  if (cs.processes.empty()) throw InvariantError("control structure has no controlled process");
  std::vector<Node> nodes = cs.controllers;
  nodes.insert(nodes.end(), cs.processes.begin(), cs.processes.end());
  require_unique_ids(nodes, "control structure element");
  require_unique_ids(cs.control_actions, "control action");
  require_unique_ids(cs.feedback, "feedback");
  for (const auto& a : cs.control_actions) {
    if (!find_node(cs.controllers, a.controller))
      throw InvariantError("control action '" + a.id + "' comes from unknown controller '" +
                           a.controller + "'");
    if (!find_node(cs.processes, a.process))
      throw InvariantError("control action '" + a.id + "' targets unknown process '" + a.process +
                           "'");
  }
  for (const auto& f : cs.feedback) {
    if (!find_node(cs.processes, f.process))
      throw InvariantError("feedback '" + f.id + "' comes from unknown process '" + f.process +
                           "'");
    if (!find_node(cs.controllers, f.controller))
      throw InvariantError("feedback '" + f.id + "' targets unknown controller '" +
                           f.controller + "'");
  }
  for (const auto& c : cs.controllers)
    if (std::none_of(cs.control_actions.begin(), cs.control_actions.end(),
                     [&](const ControlAction& a) { return a.controller == c.id; }))
      throw InvariantError("controller '" + c.id + "' issues no control action");

  AnalysisBase base;
  base.accidents = std::move(accidents);
  base.hazards = std::move(hazards);
  base.constraints = std::move(constraints);
  base.structure = std::move(structure);
  return base;
}

ItemDefinition derive_item_definition(const AnalysisBase& base, const ItemInfo& info) {
  const ControlStructure& cs = base.structure;
  ItemDefinition item;
  item.name = info.name;
  item.purpose = info.purpose;
  std::set<std::string> inside;
  if (info.inside) {
    for (const auto& id : *info.inside)
      if (!find_node(cs.controllers, id) && !find_node(cs.processes, id))
        throw InvariantError("item boundary names unknown element '" + id + "'");
    inside.insert(info.inside->begin(), info.inside->end());
  } else {
    for (const auto& c : cs.controllers) inside.insert(c.id);
  }
  for (const auto* group : {&cs.controllers, &cs.processes})
    for (const auto& n : *group) (inside.count(n.id) ? item.inside : item.outside).push_back(n.id);
  for (const auto& a : cs.control_actions) {
    const Node* from = find_node(cs.controllers, a.controller);
    const Node* to = find_node(cs.processes, a.process);
    item.functional_requirements.push_back(
        {"FR-" + a.id, a.id,
         from->name + " shall command '" + a.name + "' to " + to->name + "."});
  }
  return item;
}

std::vector<HazardousEvent> run_hara(const AnalysisBase& base,
                                     const std::vector<OperationalSituation>& situations,
                                     const std::vector<Classification>& classifications,
                                     const AsilTable& table) {
  require_unique_ids(situations, "situation");
  std::set<std::pair<std::string, std::string>> pairs;
  std::vector<HazardousEvent> events;
  for (const auto& c : classifications) {
    const Hazard* h = base.hazard(c.hazard_id);
    if (!h) throw InvariantError("classification references unknown hazard '" + c.hazard_id + "'");
    const auto sit = std::find_if(situations.begin(), situations.end(),
                                  [&](const OperationalSituation& s) { return s.id == c.situation_id; });
    if (sit == situations.end())
      throw InvariantError("classification references unknown situation '" + c.situation_id +
                           "'");
    if (!pairs.insert({c.hazard_id, c.situation_id}).second)
      throw InvariantError("pair (" + c.hazard_id + ", " + c.situation_id +
                           ") is classified twice");
    HazardousEvent ev;
    ev.id = "HE-" + c.hazard_id + "-" + c.situation_id;
    ev.hazard_id = c.hazard_id;
    ev.situation_id = c.situation_id;
    ev.severity = c.severity;
    ev.exposure = c.exposure;
    ev.controllability = c.controllability;
    ev.asil = table.lookup(c.severity, c.exposure, c.controllability);
    ev.safety_goal = c.safety_goal && !c.safety_goal->empty()
                         ? *c.safety_goal
                         : "Prevent/mitigate " + h->description + " in " + sit->description;
    events.push_back(std::move(ev));
  }
  sort_by_id(events);
  return events;
}

std::vector<UcaCandidate> uca_candidate_grid(const AnalysisBase& base) {
  std::vector<UcaCandidate> grid;
  for (const auto& a : base.structure.control_actions)
    for (UcaType t : kUcaTypes) grid.push_back({a.id, t});
  return grid;
}

std::vector<UnsafeControlAction> identify_ucas(const AnalysisBase& base,
                                               const std::vector<HazardousEvent>& events,
                                               const std::vector<UcaWorksheetRow>& rows) {
  if (events.empty()) throw InvariantError("UCA identification needs at least one hazardous event");
  require_unique_ids(rows, "UCA");
  std::vector<UnsafeControlAction> out;
  for (const auto& r : rows) {
    if (!base.control_action(r.control_action_id))
      throw InvariantError("UCA '" + r.id + "' references unknown control action '" +
                           r.control_action_id + "'");
    for (const auto& h : r.linked_hazards)
      if (!base.hazard(h))
        throw InvariantError("UCA '" + r.id + "' links unknown hazard '" + h + "'");
    if (!r.confirmed) continue;
    if (r.linked_hazards.empty())
      throw InvariantError("confirmed UCA '" + r.id + "' is not linked to any hazard");
    out.push_back({r.id, r.control_action_id, r.type, r.context, r.linked_hazards});
  }
  sort_by_id(out);
  return out;
}

std::vector<CausalFactor> analyze_causal_factors(const std::vector<UnsafeControlAction>& ucas,
                                                 const std::vector<CausalFactor>& entries) {
  require_unique_ids(entries, "causal factor");
  for (const auto& f : entries)
    if (!contains_id(ucas, f.uca_id))
      throw InvariantError("causal factor '" + f.id + "' references unknown UCA '" + f.uca_id +
                           "'");
  std::vector<CausalFactor> out = entries;
  sort_by_id(out);
  return out;
}

std::vector<std::string> completeness_report(const std::vector<HazardousEvent>& events,
                                             const std::vector<UnsafeControlAction>& ucas,
                                             const std::vector<CausalFactor>& factors) {
  std::vector<std::string> problems;
  if (events.empty()) problems.push_back("no hazardous events");
  for (const auto& e : events)
    if (e.safety_goal.empty()) problems.push_back("event " + e.id + " has no safety goal");
  for (const auto& u : ucas)
    if (std::none_of(factors.begin(), factors.end(),
                     [&](const CausalFactor& f) { return f.uca_id == u.id; }))
      problems.push_back("UCA " + u.id + " has no causal factor");
  return problems;
}

CompletenessError::CompletenessError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::string msg = "analysis incomplete:";
        for (const auto& p : problems) msg += "\n  - " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

SafetyConcept emit_safety_concept(const AnalysisBase& base,
                                  const std::vector<HazardousEvent>& events,
                                  const std::vector<UnsafeControlAction>& ucas,
                                  const std::vector<CausalFactor>& factors) {
  auto problems = completeness_report(events, ucas, factors);
  if (!problems.empty()) throw CompletenessError(std::move(problems));

  SafetyConcept out;
  std::map<std::string, Asil> hazard_asil;
  for (const auto& e : events) {
    out.goals.push_back({e.id, e.hazard_id, e.situation_id, e.asil, e.safety_goal});
    auto [it, fresh] = hazard_asil.emplace(e.hazard_id, e.asil);
    if (!fresh) it->second = std::max(it->second, e.asil);
  }
  for (const auto& u : ucas) {
    const ControlAction* action = base.control_action(u.control_action_id);
    if (!action) throw InvariantError("UCA '" + u.id + "' references an unknown control action");
    const Node* controller = find_node(base.structure.controllers, action->controller);
    SafetyRequirement r;
    r.id = "SR-" + u.id;
    r.uca_id = u.id;
    r.hazard_ids = u.linked_hazards;
    for (const auto& h : u.linked_hazards)
      if (auto it = hazard_asil.find(h); it != hazard_asil.end()) r.asil = std::max(r.asil, it->second);
    r.text = requirement_text(*action, *controller, u);
    out.requirements.push_back(std::move(r));
  }
  for (const auto& f : factors)
    out.mitigations.push_back(
        {f.id, f.uca_id, "Mitigate " + f.factor + " so that it cannot lead to: " + f.unsafe_scenario});
  sort_by_id(out.requirements);
  std::sort(out.goals.begin(), out.goals.end(),
            [](const SafetyGoal& a, const SafetyGoal& b) { return a.event_id < b.event_id; });
  std::sort(out.mitigations.begin(), out.mitigations.end(),
            [](const Mitigation& a, const Mitigation& b) { return a.factor_id < b.factor_id; });
  return out;
}

std::vector<std::string> traceability_gaps(const SafetyConcept& safety_concept,
                                           const AnalysisBase& base,
                                           const std::vector<UnsafeControlAction>& ucas) {
  std::vector<std::string> gaps;
  for (const auto& r : safety_concept.requirements) {
    const auto u = std::find_if(ucas.begin(), ucas.end(),
                                [&](const UnsafeControlAction& x) { return x.id == r.uca_id; });
    if (u == ucas.end()) {
      gaps.push_back(r.id + ": unknown UCA " + r.uca_id);
      continue;
    }
    if (u->linked_hazards.empty()) gaps.push_back(r.id + ": UCA " + u->id + " links no hazard");
    for (const auto& hid : u->linked_hazards) {
      const Hazard* h = base.hazard(hid);
      if (!h) {
        gaps.push_back(r.id + ": UCA " + u->id + " links unknown hazard " + hid);
        continue;
      }
      if (h->linked_accidents.empty()) gaps.push_back(r.id + ": hazard " + hid + " links no accident");
      for (const auto& aid : h->linked_accidents)
        if (!contains_id(base.accidents, aid))
          gaps.push_back(r.id + ": hazard " + hid + " links unknown accident " + aid);
    }
  }
  return gaps;
}

Analysis analyze(const Model& model, const AsilTable& table) {
  Analysis a;
  a.base = step0_fundamentals(model.accidents, model.hazards, model.constraints, model.structure);
  a.item = derive_item_definition(a.base, model.item);
  a.events = run_hara(a.base, model.situations, model.classifications, table);
  if (!a.events.empty()) a.ucas = identify_ucas(a.base, a.events, model.ucas);
  a.factors = analyze_causal_factors(a.ucas, model.causal_factors);
  return a;
}

}  // namespace avcert::stpa
