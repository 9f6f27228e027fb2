#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "trebeca/checked_model.hpp"
#include "trebeca/time.hpp"
#include "trebeca/value.hpp"

namespace trebeca {

enum class EventKind : std::uint8_t {
  MsgSent,
  MsgSelected,
  MsgPurged,
  DelayExecuted,
  RebecCreated,
  RunEnded,
};

enum class TerminationReason : std::uint8_t {
  None,
  EmptyBag,
  AllExpired,
  Horizon,
  MaxSteps,
  MaxStates,
  Error,
};

const char* event_kind_name(EventKind k);
const char* termination_reason_name(TerminationReason r);

/// One observation. `time` is the instant the event happens at:
///  - msg_sent: the sender's now at the send;
///  - msg_selected: max(tt, receiver now), the instant the method starts;
///  - msg_purged: the scheduler's current time, the least tt in the bag
///    before purging;
///  - delay_executed: the executing rebec's now after the delay;
///  - rebec_created: the creator's now;
///  - run_ended: the least tt left in the bag, or the last event time.
/// Every event produced by a later step has time >= the least tt in the bag
/// at that step, which is what lets truncated runs answer WITHIN bounds.
struct TraceEvent {
  EventKind kind = EventKind::MsgSent;
  TerminationReason reason = TerminationReason::None;  // run_ended only
  std::uint32_t rebec_class = 0;
  std::uint32_t method = 0;  // index in rebec_class; kNoMethod when not applicable
  RebecId rebec;
  RebecId sender = RebecId::external();
  std::uint32_t sender_class = 0;
  std::uint64_t step = 0;
  TimeValue time;
  std::optional<TimeValue> tt;
  std::optional<Deadline> dl;

  static constexpr std::uint32_t kNoMethod = 0xFFFFFFFFu;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

/// How much of the future a finished (possibly truncated) run has observed.
struct RunEnd {
  TerminationReason reason = TerminationReason::None;
  /// Every event with time <= covered_until is in the trace. Complete runs
  /// use the maximum; -1 means nothing is known to be covered.
  std::int64_t covered_until = -1;

  bool complete() const {
    return reason == TerminationReason::EmptyBag || reason == TerminationReason::AllExpired ||
           reason == TerminationReason::Error;
  }
  static constexpr std::int64_t kEverything = std::numeric_limits<std::int64_t>::max();
};

/// Decisions taken by the choice resolver during one scheduler step: the tie
/// index first (only when several messages tie), then every `?` outcome in
/// execution order.
using StepDecisions = std::vector<std::uint32_t>;

struct Trace {
  std::shared_ptr<const CheckedModel> model;
  std::vector<TraceEvent> events;
  std::vector<StepDecisions> decisions;  // one entry per executed step
  RunEnd end;

  bool truncated() const { return !end.complete(); }
};

std::string rebec_display_name(const CheckedModel& model, RebecId id, std::uint32_t cls);

/// JSON Lines, one event per line, fields in the order
/// step, kind, time, rebec, method, sender, tt, dl (+ reason, covered for
/// run_ended). Infinite deadlines serialize as "inf".
std::string to_jsonl(const Trace& trace);
std::string event_to_json(const CheckedModel& model, const TraceEvent& e);

}  // namespace trebeca
