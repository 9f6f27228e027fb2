#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "trebeca/ast.hpp"
#include "trebeca/explorer.hpp"
#include "trebeca/trace.hpp"

namespace trebeca {

enum class ObservedKind : std::uint8_t { Selected, Purged, Sent };

/// (kind, rebec pattern, method pattern); `*` matches anything. A rebec
/// pattern matches the instance name or the class name.
struct EventPattern {
  ObservedKind kind = ObservedKind::Selected;
  std::string rebec = "*";
  std::string method = "*";

  friend bool operator==(const EventPattern&, const EventPattern&) = default;
};

enum class ClauseKind : std::uint8_t { Eventually, Never, AlwaysPrecedes };

struct Clause {
  ClauseKind kind = ClauseKind::Eventually;
  EventPattern event;                 // EVENTUALLY/NEVER event; ALWAYS-PRECEDES first
  std::optional<EventPattern> later;  // ALWAYS-PRECEDES second event
  std::optional<TimeValue> within;    // only events with time <= within count
  std::string text;                   // source line, trimmed
  int line = 0;
};

struct MonitorSpec {
  std::vector<Clause> clauses;
};

class MonitorSyntaxError : public std::runtime_error {
 public:
  MonitorSyntaxError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// One clause per line, `#` starts a comment:
///   EVENTUALLY <event> [WITHIN t]
///   NEVER <event> [WITHIN t]
///   ALWAYS-PRECEDES(<event>, <event>) [WITHIN t]
/// where <event> is `selected|purged|sent rebec.method`.
MonitorSpec parse_monitor(std::string_view text);

/// Reports clause patterns naming no instance, class or method of the model.
std::vector<std::string> unknown_pattern_names(const MonitorSpec& spec, const CheckedModel& model);

enum class VerdictValue : std::uint8_t { Pass, Fail, Inconclusive };
const char* verdict_name(VerdictValue v);

struct ClauseVerdict {
  VerdictValue value = VerdictValue::Inconclusive;
  /// Trace verdicts: index of the deciding event (the run_ended event when
  /// the verdict was settled by the end of the run).
  std::optional<std::size_t> witness_event;
  /// Graph verdicts: edge ids from the initial state.
  std::vector<std::uint32_t> witness_path;
};

struct Verdict {
  std::vector<ClauseVerdict> clauses;
  VerdictValue overall() const;  // Fail > Inconclusive > Pass
};

Verdict check_trace(const Trace& trace, const MonitorSpec& spec);

struct GraphVerdict {
  Verdict exists;  // some maximal path satisfies the clause
  Verdict forall;  // every maximal path satisfies the clause
};

GraphVerdict check_graph(const ExploreResult& result, const MonitorSpec& spec);

/// Incremental monitor for one clause; exposed for reuse by the graph checker
/// and tests.
class ClauseMonitor {
 public:
  ClauseMonitor(const Clause& clause, const CheckedModel& model);

  /// Monitor state after consuming `event` from state `s`.
  std::uint8_t step(std::uint8_t s, const TraceEvent& event) const;
  static constexpr std::uint8_t kInitial = 0;
  /// Verdict if settled regardless of the future.
  std::optional<VerdictValue> settled(std::uint8_t s) const;
  /// Verdict of a run that stopped in monitor state `s`.
  VerdictValue at_end(std::uint8_t s, const RunEnd& end) const;

 private:
  bool matches(const EventPattern& p, const TraceEvent& e) const;
  const Clause& clause_;
  const CheckedModel& model_;
};

}  // namespace trebeca
