#include "trebeca/trace.hpp"

#include "json.hpp"

namespace trebeca {

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::MsgSent: return "msg_sent";
    case EventKind::MsgSelected: return "msg_selected";
    case EventKind::MsgPurged: return "msg_purged";
    case EventKind::DelayExecuted: return "delay_executed";
    case EventKind::RebecCreated: return "rebec_created";
    case EventKind::RunEnded: return "run_ended";
  }
  return "?";
}

const char* termination_reason_name(TerminationReason r) {
  switch (r) {
    case TerminationReason::None: return "none";
    case TerminationReason::EmptyBag: return "empty_bag";
    case TerminationReason::AllExpired: return "all_expired";
    case TerminationReason::Horizon: return "horizon";
    case TerminationReason::MaxSteps: return "max_steps";
    case TerminationReason::MaxStates: return "max_states";
    case TerminationReason::Error: return "error";
  }
  return "?";
}

std::string rebec_display_name(const CheckedModel& model, RebecId id, std::uint32_t cls) {
  return model.rebec_name(id, cls);
}

namespace {

nlohmann::ordered_json event_json(const CheckedModel& model, const TraceEvent& e) {
  nlohmann::ordered_json j;
  j["step"] = e.step;
  j["kind"] = event_kind_name(e.kind);
  j["time"] = e.time.ticks();
  if (e.kind == EventKind::RunEnded) {
    j["rebec"] = nullptr;
    j["method"] = nullptr;
    j["sender"] = nullptr;
  } else {
    j["rebec"] = model.rebec_name(e.rebec, e.rebec_class);
    if (e.method == TraceEvent::kNoMethod) {
      j["method"] = nullptr;
    } else {
      j["method"] = model.method(e.rebec_class, e.method).name;
    }
    j["sender"] = model.rebec_name(e.sender, e.sender_class);
  }
  j["tt"] = e.tt ? nlohmann::ordered_json(e.tt->ticks()) : nlohmann::ordered_json(nullptr);
  if (!e.dl) {
    j["dl"] = nullptr;
  } else if (e.dl->is_infinite()) {
    j["dl"] = "inf";
  } else {
    j["dl"] = e.dl->value().ticks();
  }
  if (e.kind == EventKind::RunEnded) j["reason"] = termination_reason_name(e.reason);
  return j;
}

}  // namespace

std::string event_to_json(const CheckedModel& model, const TraceEvent& e) {
  return event_json(model, e).dump();
}

std::string to_jsonl(const Trace& trace) {
  std::string out;
  for (const auto& e : trace.events) {
    auto j = event_json(*trace.model, e);
    if (e.kind == EventKind::RunEnded) {
      if (trace.end.covered_until == RunEnd::kEverything) {
        j["covered"] = "inf";
      } else {
        j["covered"] = trace.end.covered_until;
      }
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace trebeca
