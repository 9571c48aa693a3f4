#include "avcert/pipeline.hpp"
#include "json_util.hpp"

namespace avcert::pipeline {

using detail::Json;
using detail::ObjectReader;

namespace {

void put_record(Json& j, const EvidenceRecord& r) {
  j["kind"] = r.kind;
  j["stage"] = r.stage_index;
  j["reference"] = r.reference;
  j["timestamp"] = r.timestamp;
  j["supplementary"] = r.supplementary;
}

EvidenceRecord record_from(const ObjectReader& r) {
  EvidenceRecord e;
  e.kind = r.string("kind");
  e.stage_index = static_cast<int>(r.integer("stage"));
  e.reference = r.string_or("reference", "");
  e.timestamp = r.string_or("timestamp", "");
  e.supplementary = r.has("supplementary") && r.boolean("supplementary");
  return e;
}

Json event_json(const Event& e) {
  using T = Event::Type;
  Json j;
  j["type"] = to_string(e.type);
  switch (e.type) {
    case T::Evidence: put_record(j, e.evidence); break;
    case T::UnitEvidence:
      j["unit"] = e.unit_id;
      put_record(j, e.evidence);
      break;
    case T::Advance:
    case T::Rollback:
      j["from"] = e.from;
      j["to"] = e.to;
      break;
    case T::UnitStage:
      j["unit"] = e.unit_id;
      j["stage"] = e.to;
      break;
    case T::PegasusStep: j["step"] = e.step; break;
    case T::PegasusLayer: j["layer"] = to_string(e.layer); break;
  }
  return j;
}

Event event_from(const ObjectReader& r) {
  using T = Event::Type;
  const std::string type = r.string("type");
  Event e;
  bool known = false;
  for (T t : {T::Evidence, T::Advance, T::Rollback, T::UnitEvidence, T::UnitStage, T::PegasusStep,
              T::PegasusLayer})
    if (type == to_string(t)) e.type = t, known = true;
  if (!known) throw ParseError(r.child("type"), "unknown event type '" + type + "'");
  switch (e.type) {
    case T::Evidence:
      r.allow_only({"type", "kind", "stage", "reference", "timestamp", "supplementary"});
      e.evidence = record_from(r);
      break;
    case T::UnitEvidence:
      r.allow_only({"type", "unit", "kind", "stage", "reference", "timestamp", "supplementary"});
      e.unit_id = r.string("unit");
      e.evidence = record_from(r);
      break;
    case T::Advance:
    case T::Rollback:
      r.allow_only({"type", "from", "to"});
      e.from = static_cast<int>(r.integer("from"));
      e.to = static_cast<int>(r.integer("to"));
      break;
    case T::UnitStage:
      r.allow_only({"type", "unit", "stage"});
      e.unit_id = r.string("unit");
      e.to = static_cast<int>(r.integer("stage"));
      break;
    case T::PegasusStep:
      r.allow_only({"type", "step"});
      e.step = static_cast<int>(r.integer("step"));
      break;
    case T::PegasusLayer: {
      r.allow_only({"type", "layer"});
      const std::string name = r.string("layer");
      const auto l = layer_from_string(name);
      if (!l) throw ParseError(r.child("layer"), "unknown layer '" + name + "'");
      e.layer = *l;
      break;
    }
  }
  return e;
}

}  // namespace

std::string to_json(const Project& p) {
  Json j;
  j["id"] = p.id;
  j["events"] = Json::array();
  for (const auto& e : p.history) j["events"].push_back(event_json(e));
  return j.dump(2) + "\n";
}

Project from_json(const std::string& text) {
  const Json doc = detail::parse_document(text);
  const ObjectReader r(doc, "");
  r.allow_only({"id", "events"});
  const std::string id = r.string("id");
  const Json& arr = r.array("events");
  std::vector<Event> events;
  for (std::size_t i = 0; i < arr.size(); ++i)
    events.push_back(event_from(ObjectReader(arr[i], "/events/" + std::to_string(i))));
  Project p = create_project(id);
  for (std::size_t i = 0; i < events.size(); ++i) {
    try {
      apply_event(p, events[i]);
    } catch (const std::exception& ex) {
      throw InvariantError("replay failed at /events/" + std::to_string(i) + ": " + ex.what());
    }
  }
  return p;
}

std::string state_json(const Project& p) {
  Json j;
  j["id"] = p.id;
  j["current_stage"] = p.current_stage;
  j["stage_name"] = stage(p.current_stage).name;
  j["evidence"] = Json::array();
  for (const auto& r : p.evidence) {
    Json e;
    put_record(e, r);
    j["evidence"].push_back(e);
  }
  j["missing"] = Json::array();
  if (p.current_stage <= kTypeApprovalStage)
    for (const auto& k : missing_evidence(p, p.current_stage)) j["missing"].push_back(k);
  j["units"] = Json::array();
  for (const auto& u : p.units)
    j["units"].push_back({{"unit", u.unit_id},
                          {"produced", u.produced},
                          {"routine_tested", u.routine_tested},
                          {"licensed", u.licensed}});
  Json steps = Json::array();
  for (int s : p.pegasus.completed_steps) steps.push_back(s);
  Json layers = Json::object();
  for (const auto& [l, done] : argumentation_checklist(p)) layers[to_string(l)] = done ? "done" : "pending";
  j["pegasus"] = {{"completed_steps", steps}, {"layers", layers}};
  j["history_length"] = p.history.size();
  return j.dump(2) + "\n";
}

Project load_file(const std::string& path) { return from_json(detail::read_text_file(path)); }

void save_file(const Project& p, const std::string& path) { detail::write_text_file(path, to_json(p)); }

}  // namespace avcert::pipeline
