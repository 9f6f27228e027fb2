#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <string>
#include <vector>

#include "trebeca/interpreter.hpp"
#include "trebeca/trace.hpp"

namespace trebeca {

enum class TieBreak : std::uint8_t {
  SeededUniform,  // ties go to the run's seeded resolver
  FixedOrder,     // always the first tied message in canonical bag order
  Controlled,     // ties go to the caller-supplied resolver (explorer, replay)
};

enum class DeadlineCheck : std::uint8_t {
  Literal,    // receiver.now <= dl
  Effective,  // max(tt, receiver.now) <= dl
};

struct SchedulePolicy {
  TieBreak tie_break = TieBreak::SeededUniform;
  DeadlineCheck deadline_check = DeadlineCheck::Literal;
  std::optional<TimeValue> horizon;
  std::optional<std::uint64_t> max_steps;
};

bool eligible(const Message& msg, const SystemState& state, DeadlineCheck mode);

struct StepOutcome {
  bool terminated = false;
  RunEnd end;  // valid when terminated
  std::vector<TraceEvent> events;
  /// Selected message, valid when not terminated.
  Message selected;
  TimeValue selected_at;
};

/// One application of the scheduler rule: purge every ineligible message,
/// pick a message with globally minimal tt (ties resolved per policy) and
/// execute it. Terminates without executing when the bag is empty, when
/// purging emptied it, or when the minimal tt lies beyond the horizon.
/// The bag is left in canonical order.
StepOutcome scheduler_step(const RunContext& ctx, SystemState& state, const SchedulePolicy& policy,
                           ChoiceResolver& resolver, std::uint64_t step);

/// Builds the initial state from the main block: instances in declaration
/// order with now = 0, each `initial` queued with tt = 0 and dl = inf, sent
/// by the external id. Returns the creation/send events.
SystemState initial_state(const RunContext& ctx, std::vector<TraceEvent>* events = nullptr);

/// Checks that every env variable is bound, producing the context.
/// Throws std::invalid_argument naming the first unbound variable.
RunContext make_context(std::shared_ptr<const CheckedModel> model,
                        const std::unordered_map<std::string, std::int64_t>& bindings);

/// Iterates scheduler_step from the initial state until termination. Policy
/// must set a horizon or max_steps. Throws RuntimeError on interpreter faults.
Trace run(const RunContext& ctx, std::uint64_t seed, const SchedulePolicy& policy);

/// As above, with every decision (ties included) taken from `resolver`.
Trace run_with(const RunContext& ctx, ChoiceResolver& resolver, const SchedulePolicy& policy,
               SystemState* final_state = nullptr);

}  // namespace trebeca
