#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trebeca/scheduler.hpp"

namespace trebeca {

struct ExploreBounds {
  std::optional<TimeValue> horizon;
  std::optional<std::uint64_t> max_steps;    // path length bound
  /// Stored states at most. A state is expanded with all its successors or
  /// not at all, so the count can overshoot by one state's fan-out.
  std::optional<std::size_t> max_states;
};

struct ExploreOptions {
  ExploreBounds bounds;
  DeadlineCheck deadline_check = DeadlineCheck::Literal;
  unsigned workers = 1;
  /// When set, successors of each state are generated and merged in a
  /// pseudo-random order derived from this seed. The reachable key set must
  /// not depend on it.
  std::optional<std::uint64_t> shuffle_seed;
};

using StateId = std::uint32_t;

struct StateInfo {
  std::string key;
  std::uint64_t depth = 0;       // BFS distance from the initial state
  TimeValue earliest_time;       // least selection time over reaching edges
  /// Set for states with no successors (or not expanded because of a bound).
  std::optional<RunEnd> terminal;
  std::string error;             // interpreter fault, for error terminals
  /// Events of the final, non-executing scheduler step (purges), if any.
  std::vector<TraceEvent> terminal_events;
};

struct Edge {
  StateId from = 0;
  StateId to = 0;
  StepDecisions decision;
  std::vector<TraceEvent> events;
};

struct ExploreResult {
  std::shared_ptr<const CheckedModel> model;
  std::vector<StateInfo> states;
  std::vector<Edge> edges;
  std::vector<std::vector<std::uint32_t>> out_edges;  // edge ids per state
  std::vector<TraceEvent> initial_events;              // main-block construction
  StateId initial = 0;
  bool truncated = false;      // some path was cut by a bound
  bool state_limit_hit = false;  // max_states left states unexpanded
  ExploreOptions options;

  std::size_t terminal_count() const;
  std::optional<StateId> find(const std::string& key) const;
  /// Edge leaving `from` with exactly this decision vector.
  std::optional<std::uint32_t> edge_for(StateId from, const StepDecisions& decision) const;
};

/// Breadth-first enumeration of every scheduler tie and every `?` outcome,
/// deduplicating states by canonical key. Bounds set the truncation flag
/// instead of failing; interpreter faults become error terminals.
ExploreResult explore(const RunContext& ctx, const ExploreOptions& options);

/// Deterministic re-execution of a decision path from the initial state.
/// Throws std::invalid_argument when the path does not exist in `result`
/// (for instance because the model changed).
Trace replay(const RunContext& ctx, const ExploreResult& result,
             const std::vector<StepDecisions>& path);

/// Follows `path` through the graph; returns the state reached or nullopt
/// when some decision has no matching edge.
std::optional<StateId> follow_path(const ExploreResult& result,
                                   const std::vector<StepDecisions>& path);

/// Graph export: {"nodes":[...],"edges":[...],"terminals":[...]}.
std::string to_json(const ExploreResult& result);
std::string to_dot(const ExploreResult& result);

}  // namespace trebeca
