#include <sstream>

#include "avcert/stpa.hpp"
#include "json_util.hpp"

namespace avcert::stpa {

namespace {

#include "asil_default_table.inc"

using detail::Json;
using detail::ObjectReader;

template <class F>
void each(const ObjectReader& r, const char* key, F f) {
  if (!r.has(key)) return;
  const Json& arr = r.array(key);
  for (std::size_t i = 0; i < arr.size(); ++i)
    f(ObjectReader(arr[i], r.child(key) + "/" + std::to_string(i)));
}

std::vector<std::string> strings(const ObjectReader& r, const char* key) {
  std::vector<std::string> out;
  if (!r.has(key)) return out;
  const Json& arr = r.array(key);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_string())
      throw ParseError(r.child(key) + "/" + std::to_string(i), "expected a string");
    out.push_back(arr[i].get<std::string>());
  }
  return out;
}

int class_of(const ObjectReader& r, const char* key, char prefix, int max) {
  const Json& v = r.at(key);
  if (v.is_number_integer()) return static_cast<int>(v.get<long long>());
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.size() == 2 && s[0] == prefix && s[1] >= '0' && s[1] <= '0' + max) return s[1] - '0';
  }
  throw ParseError(r.child(key), std::string("expected ") + prefix + "0.." + prefix +
                                     std::to_string(max));
}

Node node_from(const ObjectReader& r) {
  r.allow_only({"id", "name"});
  return {r.string("id"), r.string_or("name", r.string("id"))};
}

Json node_list(const std::vector<std::string>& ids) {
  Json arr = Json::array();
  for (const auto& id : ids) arr.push_back(id);
  return arr;
}

}  // namespace

AsilTable load_asil_table(const std::string& json_text) {
  const Json doc = detail::parse_document(json_text);
  const ObjectReader r(doc, "");
  r.allow_only({"name", "zero_class", "entries"});
  if (r.string_or("zero_class", "QM") != "QM")
    throw InvariantError("ASIL table: zero_class must be QM");
  std::vector<std::array<int, 3>> keys;
  std::vector<Asil> values;
  each(r, "entries", [&](const ObjectReader& e) {
    e.allow_only({"s", "e", "c", "asil"});
    keys.push_back({class_of(e, "s", 'S', 3), class_of(e, "e", 'E', 4), class_of(e, "c", 'C', 3)});
    const std::string a = e.string("asil");
    const auto asil = asil_from_string(a);
    if (!asil) throw ParseError(e.child("asil"), "unknown ASIL '" + a + "'");
    values.push_back(*asil);
  });
  if (!r.has("entries")) throw ParseError("/entries", "missing required key");
  return AsilTable::from_entries(r.string_or("name", "custom"), keys, values);
}

AsilTable load_asil_table_file(const std::string& path) {
  return load_asil_table(detail::read_text_file(path));
}

const AsilTable& AsilTable::default_table() {
  static const AsilTable table = load_asil_table(kDefaultAsilTableJson);
  return table;
}

Model parse_model(const std::string& json_text) {
  const Json doc = detail::parse_document(json_text);
  const ObjectReader r(doc, "");
  r.allow_only({"item", "accidents", "hazards", "constraints", "control_structure", "situations",
                "classifications", "ucas", "causal_factors"});
  Model m;
  if (r.has("item")) {
    const ObjectReader it = r.object("item");
    it.allow_only({"name", "purpose", "inside"});
    m.item.name = it.string_or("name", m.item.name);
    m.item.purpose = it.string_or("purpose", "");
    if (it.has("inside")) m.item.inside = strings(it, "inside");
  }
  each(r, "accidents", [&](const ObjectReader& a) {
    a.allow_only({"id", "description", "loss_categories"});
    Accident acc{a.string("id"), a.string_or("description", ""), {}};
    const auto cats = strings(a, "loss_categories");
    for (std::size_t i = 0; i < cats.size(); ++i) {
      const auto c = loss_category_from_string(cats[i]);
      if (!c)
        throw ParseError(a.child("loss_categories/" + std::to_string(i)),
                         "unknown loss category '" + cats[i] + "'");
      acc.loss_categories.insert(*c);
    }
    m.accidents.push_back(std::move(acc));
  });
  each(r, "hazards", [&](const ObjectReader& h) {
    h.allow_only({"id", "description", "linked_accidents", "worst_case_environment"});
    m.hazards.push_back({h.string("id"), h.string_or("description", ""),
                         strings(h, "linked_accidents"), h.string_or("worst_case_environment", "")});
  });
  each(r, "constraints", [&](const ObjectReader& c) {
    c.allow_only({"id", "hazard", "statement"});
    m.constraints.push_back({c.string("id"), c.string("hazard"), c.string_or("statement", "")});
  });
  if (r.has("control_structure")) {
    const ObjectReader cs = r.object("control_structure");
    cs.allow_only({"controllers", "processes", "control_actions", "feedback"});
    each(cs, "controllers", [&](const ObjectReader& n) { m.structure.controllers.push_back(node_from(n)); });
    each(cs, "processes", [&](const ObjectReader& n) { m.structure.processes.push_back(node_from(n)); });
    each(cs, "control_actions", [&](const ObjectReader& a) {
      a.allow_only({"id", "from", "to", "name"});
      m.structure.control_actions.push_back(
          {a.string("id"), a.string("from"), a.string("to"), a.string_or("name", a.string("id"))});
    });
    each(cs, "feedback", [&](const ObjectReader& f) {
      f.allow_only({"id", "from", "to", "name"});
      m.structure.feedback.push_back(
          {f.string("id"), f.string("from"), f.string("to"), f.string_or("name", f.string("id"))});
    });
  }
  each(r, "situations", [&](const ObjectReader& s) {
    s.allow_only({"id", "description", "operating_mode"});
    m.situations.push_back(
        {s.string("id"), s.string_or("description", ""), s.string_or("operating_mode", "")});
  });
  each(r, "classifications", [&](const ObjectReader& c) {
    c.allow_only({"hazard", "situation", "severity", "exposure", "controllability", "rationale",
                  "safety_goal"});
    Classification k;
    k.hazard_id = c.string("hazard");
    k.situation_id = c.string("situation");
    k.severity = class_of(c, "severity", 'S', 3);
    k.exposure = class_of(c, "exposure", 'E', 4);
    k.controllability = class_of(c, "controllability", 'C', 3);
    k.rationale = c.string_or("rationale", "");
    if (c.has("safety_goal")) k.safety_goal = c.string("safety_goal");
    m.classifications.push_back(std::move(k));
  });
  each(r, "ucas", [&](const ObjectReader& u) {
    u.allow_only({"id", "control_action", "type", "context", "linked_hazards", "confirmed"});
    UcaWorksheetRow row;
    row.id = u.string("id");
    row.control_action_id = u.string("control_action");
    const std::string type = u.string("type");
    const auto t = uca_type_from_string(type);
    if (!t) throw ParseError(u.child("type"), "unknown UCA type '" + type + "'");
    row.type = *t;
    row.context = u.string_or("context", "");
    row.linked_hazards = strings(u, "linked_hazards");
    row.confirmed = u.has("confirmed") ? u.boolean("confirmed") : true;
    m.ucas.push_back(std::move(row));
  });
  each(r, "causal_factors", [&](const ObjectReader& f) {
    f.allow_only({"id", "uca", "factor", "unsafe_scenario"});
    m.causal_factors.push_back(
        {f.string("id"), f.string("uca"), f.string("factor"), f.string_or("unsafe_scenario", "")});
  });
  return m;
}

Model load_model_file(const std::string& path) { return parse_model(detail::read_text_file(path)); }

std::string to_json(const ItemDefinition& item) {
  Json j;
  j["name"] = item.name;
  j["purpose"] = item.purpose;
  j["boundary"] = {{"inside", node_list(item.inside)}, {"outside", node_list(item.outside)}};
  j["functional_requirements"] = Json::array();
  for (const auto& fr : item.functional_requirements)
    j["functional_requirements"].push_back(
        {{"id", fr.id}, {"control_action", fr.control_action_id}, {"text", fr.text}});
  return j.dump(2) + "\n";
}

std::string to_json(const std::vector<HazardousEvent>& events) {
  Json arr = Json::array();
  for (const auto& e : events)
    arr.push_back({{"id", e.id},
                   {"hazard", e.hazard_id},
                   {"situation", e.situation_id},
                   {"severity", "S" + std::to_string(e.severity)},
                   {"exposure", "E" + std::to_string(e.exposure)},
                   {"controllability", "C" + std::to_string(e.controllability)},
                   {"asil", to_string(e.asil)},
                   {"safety_goal", e.safety_goal}});
  return Json{{"hazardous_events", arr}}.dump(2) + "\n";
}

std::string uca_grid_json(const AnalysisBase& base, const std::vector<UcaWorksheetRow>& rows) {
  Json arr = Json::array();
  for (const auto& cell : uca_candidate_grid(base)) {
    Json row = {{"control_action", cell.control_action_id}, {"type", to_string(cell.type)}};
    Json matches = Json::array();
    for (const auto& r : rows)
      if (r.control_action_id == cell.control_action_id && r.type == cell.type)
        matches.push_back({{"id", r.id},
                           {"context", r.context},
                           {"linked_hazards", node_list(r.linked_hazards)},
                           {"confirmed", r.confirmed}});
    row["entries"] = matches;
    arr.push_back(row);
  }
  return Json{{"candidates", arr}}.dump(2) + "\n";
}

std::string to_json(const SafetyConcept& sc) {
  Json j;
  j["safety_goals"] = Json::array();
  for (const auto& g : sc.goals)
    j["safety_goals"].push_back({{"event", g.event_id},
                                 {"hazard", g.hazard_id},
                                 {"situation", g.situation_id},
                                 {"asil", to_string(g.asil)},
                                 {"goal", g.text}});
  j["safety_requirements"] = Json::array();
  for (const auto& r : sc.requirements)
    j["safety_requirements"].push_back({{"id", r.id},
                                        {"uca", r.uca_id},
                                        {"hazards", node_list(r.hazard_ids)},
                                        {"asil", to_string(r.asil)},
                                        {"text", r.text}});
  j["mitigations"] = Json::array();
  for (const auto& m : sc.mitigations)
    j["mitigations"].push_back({{"factor", m.factor_id}, {"uca", m.uca_id}, {"text", m.text}});
  return j.dump(2) + "\n";
}

std::string report(const SafetyConcept& sc, const Analysis& analysis) {
  std::ostringstream os;
  os << "Functional safety concept: " << analysis.item.name << "\n";
  if (!analysis.item.purpose.empty()) os << "Purpose: " << analysis.item.purpose << "\n";
  os << "\nSafety goals (" << sc.goals.size() << ")\n";
  for (const auto& g : sc.goals)
    os << "  [ASIL " << to_string(g.asil) << "] " << g.event_id << ": " << g.text << "\n";
  os << "\nSafety requirements (" << sc.requirements.size() << ")\n";
  for (const auto& r : sc.requirements) {
    os << "  [ASIL " << to_string(r.asil) << "] " << r.id << ": " << r.text << "\n";
    os << "      traces to " << r.uca_id;
    for (const auto& h : r.hazard_ids) os << " -> " << h;
    os << "\n";
  }
  os << "\nCausal-factor mitigations (" << sc.mitigations.size() << ")\n";
  for (const auto& m : sc.mitigations) os << "  " << m.factor_id << " (" << m.uca_id << "): " << m.text << "\n";
  return os.str();
}

}  // namespace avcert::stpa
