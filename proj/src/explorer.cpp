#include "trebeca/explorer.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "trebeca/resolvers.hpp"

namespace trebeca {

std::size_t ExploreResult::terminal_count() const {
  return static_cast<std::size_t>(
      std::count_if(states.begin(), states.end(), [](const StateInfo& s) { return s.terminal.has_value(); }));
}

std::optional<StateId> ExploreResult::find(const std::string& key) const {
  for (StateId i = 0; i < states.size(); ++i) {
    if (states[i].key == key) return i;
  }
  return std::nullopt;
}

std::optional<std::uint32_t> ExploreResult::edge_for(StateId from, const StepDecisions& decision) const {
  if (from >= out_edges.size()) return std::nullopt;
  for (auto e : out_edges[from]) {
    if (edges[e].decision == decision) return e;
  }
  return std::nullopt;
}

namespace {

SchedulePolicy policy_for(const ExploreOptions& options) {
  SchedulePolicy p;
  p.tie_break = TieBreak::Controlled;
  p.deadline_check = options.deadline_check;
  p.horizon = options.bounds.horizon;
  p.max_steps = options.bounds.max_steps;
  return p;
}

struct Successor {
  StepDecisions decision;
  std::vector<TraceEvent> events;
  TimeValue selected_at;
  std::optional<SystemState> state;  // empty for an interpreter fault
  std::string key;
  std::string error;
};

struct Expansion {
  std::optional<RunEnd> terminal;
  std::vector<TraceEvent> terminal_events;
  std::vector<Successor> successors;
};

// Enumerates every decision vector of one scheduler step from `state`.
Expansion expand(const RunContext& ctx, const SystemState& state, const SchedulePolicy& policy,
                 std::uint64_t depth) {
  Expansion ex;
  ScriptedResolver resolver;
  for (;;) {
    SystemState next = state;
    Successor succ;
    try {
      auto out = scheduler_step(ctx, next, policy, resolver, depth);
      if (out.terminated) {
        ex.terminal = out.end;
        ex.terminal_events = std::move(out.events);
        return ex;
      }
      succ.events = std::move(out.events);
      succ.selected_at = out.selected_at;
      succ.key = state_key(next);
      succ.state = std::move(next);
    } catch (const RuntimeError& err) {
      succ.error = err.what();
      succ.selected_at = state.bag.empty() ? TimeValue::zero() : state.bag.front().tt;
    }
    succ.decision = resolver.taken();
    ex.successors.push_back(std::move(succ));
    if (!resolver.advance()) break;
  }
  return ex;
}

RunEnd truncated_end(TerminationReason reason, const SystemState& state) {
  RunEnd end;
  end.reason = reason;
  auto sorted = state;
  sorted.sort_bag();
  end.covered_until = sorted.bag.empty() ? RunEnd::kEverything : sorted.bag.front().tt.ticks() - 1;
  return end;
}

}  // namespace

ExploreResult explore(const RunContext& ctx, const ExploreOptions& options) {
  ExploreResult result;
  result.model = ctx.model;
  result.options = options;
  auto policy = policy_for(options);

  // Keys live once, in result.states; the index maps their hashes.
  std::unordered_multimap<std::size_t, StateId> index;
  std::hash<std::string> hasher;
  std::vector<std::pair<StateId, SystemState>> frontier;

  SystemState init = initial_state(ctx, &result.initial_events);
  StateInfo info;
  info.key = state_key(init);
  index.emplace(hasher(info.key), 0);
  result.states.push_back(std::move(info));
  result.out_edges.emplace_back();
  frontier.emplace_back(0, std::move(init));

  std::optional<std::mt19937_64> shuffler;
  if (options.shuffle_seed) shuffler.emplace(*options.shuffle_seed);
  unsigned workers = std::max(1u, options.workers);

  auto add_state = [&](const std::string& key, std::uint64_t depth, TimeValue at) -> StateId {
    auto h = hasher(key);
    auto [lo, hi] = index.equal_range(h);
    auto it = std::find_if(lo, hi, [&](const auto& e) { return result.states[e.second].key == key; });
    if (it == hi) {
      it = index.emplace(h, static_cast<StateId>(result.states.size()));
      StateInfo s;
      s.key = key;
      s.depth = depth;
      s.earliest_time = at;
      result.states.push_back(std::move(s));
      result.out_edges.emplace_back();
    } else if (at < result.states[it->second].earliest_time) {
      result.states[it->second].earliest_time = at;
    }
    return it->second;
  };

  auto at_limit = [&] {
    return options.bounds.max_states && result.states.size() >= *options.bounds.max_states;
  };
  auto mark_unexpanded = [&](StateId id, const SystemState& state) {
    result.states[id].terminal = truncated_end(TerminationReason::MaxStates, state);
    result.truncated = true;
    result.state_limit_hit = true;
  };

  // Expansion is pure, so the frontier is handled in chunks to bound the
  // memory held by successor sets; merging stays in frontier order.
  const std::size_t chunk = std::max<std::size_t>(64, 16 * workers);
  while (!frontier.empty()) {
    if (shuffler) std::shuffle(frontier.begin(), frontier.end(), *shuffler);
    std::vector<std::pair<StateId, SystemState>> next;
    for (std::size_t base = 0; base < frontier.size(); base += chunk) {
      std::size_t count = std::min(chunk, frontier.size() - base);
      if (at_limit()) {
        for (std::size_t i = base; i < base + count; ++i) mark_unexpanded(frontier[i].first, frontier[i].second);
        continue;
      }
      std::vector<Expansion> expansions(count);
      auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < count; i += stride) {
          auto depth = result.states[frontier[base + i].first].depth;
          expansions[i] = expand(ctx, frontier[base + i].second, policy, depth);
        }
      };
      if (workers > 1 && count > 1) {
        std::vector<std::thread> pool;
        auto n = std::min<std::size_t>(workers, count);
        for (std::size_t w = 0; w < n; ++w) pool.emplace_back(work, w, n);
        for (auto& t : pool) t.join();
      } else {
        work(0, 1);
      }

      for (std::size_t i = 0; i < count; ++i) {
        StateId from = frontier[base + i].first;
        auto& ex = expansions[i];
        auto depth = result.states[from].depth;
        if (ex.terminal) {
          result.states[from].terminal = ex.terminal;
          result.states[from].terminal_events = std::move(ex.terminal_events);
          if (!ex.terminal->complete()) result.truncated = true;
          continue;
        }
        // A state is either expanded completely or not at all.
        if (at_limit()) {
          mark_unexpanded(from, frontier[base + i].second);
          continue;
        }
        if (shuffler) std::shuffle(ex.successors.begin(), ex.successors.end(), *shuffler);
        for (auto& succ : ex.successors) {
          StateId to;
          if (!succ.state) {
            to = add_state("error\n" + result.states[from].key + "\n" +
                               std::string(reinterpret_cast<const char*>(succ.decision.data()),
                                           succ.decision.size() * sizeof(std::uint32_t)),
                           depth + 1, succ.selected_at);
            auto& st = result.states[to];
            st.terminal = RunEnd{TerminationReason::Error, RunEnd::kEverything};
            st.error = succ.error;
          } else {
            auto before = result.states.size();
            to = add_state(succ.key, depth + 1, succ.selected_at);
            if (result.states.size() != before) next.emplace_back(to, std::move(*succ.state));
          }
          Edge e;
          e.from = from;
          e.to = to;
          e.decision = std::move(succ.decision);
          e.events = std::move(succ.events);
          result.out_edges[from].push_back(static_cast<std::uint32_t>(result.edges.size()));
          result.edges.push_back(std::move(e));
        }
      }
    }
    frontier = std::move(next);
  }
  return result;
}

std::optional<StateId> follow_path(const ExploreResult& result,
                                   const std::vector<StepDecisions>& path) {
  StateId at = result.initial;
  for (const auto& d : path) {
    auto e = result.edge_for(at, d);
    if (!e) return std::nullopt;
    at = result.edges[*e].to;
  }
  return at;
}

Trace replay(const RunContext& ctx, const ExploreResult& result,
             const std::vector<StepDecisions>& path) {
  Trace trace;
  trace.model = ctx.model;
  auto policy = policy_for(result.options);
  SystemState state = initial_state(ctx, &trace.events);
  StateId at = result.initial;
  if (state_key(state) != result.states[at].key) {
    throw std::invalid_argument("initial state differs from the explored graph");
  }
  auto finish = [&](RunEnd end, std::uint64_t step) {
    trace.end = end;
    TraceEvent ended;
    ended.kind = EventKind::RunEnded;
    ended.reason = end.reason;
    ended.rebec = RebecId::external();
    ended.method = TraceEvent::kNoMethod;
    ended.step = step;
    state.sort_bag();
    if (!state.bag.empty()) {
      ended.time = state.bag.front().tt;
    } else if (!trace.events.empty()) {
      ended.time = trace.events.back().time;
    }
    trace.events.push_back(ended);
  };

  for (std::uint64_t step = 0; step < path.size(); ++step) {
    auto e = result.edge_for(at, path[step]);
    if (!e) throw std::invalid_argument("decision path leaves the explored graph at step " + std::to_string(step));
    const auto& edge = result.edges[*e];
    ScriptedResolver resolver(path[step]);
    try {
      auto out = scheduler_step(ctx, state, policy, resolver, step);
      if (out.terminated || resolver.taken() != path[step]) {
        throw std::invalid_argument("decision path does not match the model at step " + std::to_string(step));
      }
      trace.events.insert(trace.events.end(), out.events.begin(), out.events.end());
    } catch (const RuntimeError&) {
      if (!result.states[edge.to].error.empty()) {
        trace.events.insert(trace.events.end(), edge.events.begin(), edge.events.end());
        trace.decisions.push_back(path[step]);
        finish(RunEnd{TerminationReason::Error, RunEnd::kEverything}, step);
        return trace;
      }
      throw;
    }
    trace.decisions.push_back(path[step]);
    at = edge.to;
    if (state_key(state) != result.states[at].key) {
      throw std::invalid_argument("replayed state differs from the explored graph at step " +
                                  std::to_string(step));
    }
  }

  auto step = static_cast<std::uint64_t>(path.size());
  if (result.states[at].terminal) {
    ScriptedResolver none;
    auto out = scheduler_step(ctx, state, policy, none, step);
    trace.events.insert(trace.events.end(), out.events.begin(), out.events.end());
    finish(out.terminated ? out.end : *result.states[at].terminal, step);
  } else {
    finish(truncated_end(TerminationReason::MaxSteps, state), step);
  }
  return trace;
}

std::string to_json(const ExploreResult& result) {
  using nlohmann::ordered_json;
  const auto& model = *result.model;
  auto events = [&](const std::vector<TraceEvent>& evs) {
    auto arr = ordered_json::array();
    for (const auto& e : evs) arr.push_back(ordered_json::parse(event_to_json(model, e)));
    return arr;
  };
  ordered_json j;
  j["initial"] = result.initial;
  j["truncated"] = result.truncated;
  auto nodes = ordered_json::array();
  auto terminals = ordered_json::array();
  for (StateId i = 0; i < result.states.size(); ++i) {
    const auto& s = result.states[i];
    ordered_json n;
    n["id"] = i;
    n["depth"] = s.depth;
    n["earliest_time"] = s.earliest_time.ticks();
    if (s.terminal) {
      n["terminal"] = termination_reason_name(s.terminal->reason);
      if (s.terminal->covered_until == RunEnd::kEverything) {
        n["covered"] = "inf";
      } else {
        n["covered"] = s.terminal->covered_until;
      }
      if (!s.error.empty()) n["error"] = s.error;
      if (!s.terminal_events.empty()) n["terminal_events"] = events(s.terminal_events);
      terminals.push_back(i);
    } else {
      n["terminal"] = nullptr;
    }
    nodes.push_back(std::move(n));
  }
  auto edges = ordered_json::array();
  for (const auto& e : result.edges) {
    ordered_json o;
    o["from"] = e.from;
    o["to"] = e.to;
    o["decision"] = e.decision;
    o["events"] = events(e.events);
    edges.push_back(std::move(o));
  }
  j["nodes"] = std::move(nodes);
  j["edges"] = std::move(edges);
  j["terminals"] = std::move(terminals);
  return j.dump(1) + "\n";
}

std::string to_dot(const ExploreResult& result) {
  const auto& model = *result.model;
  std::ostringstream os;
  os << "digraph states {\n  node [shape=circle];\n";
  for (StateId i = 0; i < result.states.size(); ++i) {
    const auto& s = result.states[i];
    os << "  s" << i << " [label=\"" << i << "\\nt>=" << s.earliest_time.ticks() << "\"";
    if (s.terminal) {
      os << ", shape=doublecircle, xlabel=\"" << termination_reason_name(s.terminal->reason) << "\"";
    }
    os << "];\n";
  }
  for (const auto& e : result.edges) {
    std::string label;
    for (const auto& ev : e.events) {
      if (ev.kind == EventKind::MsgSelected) {
        label = model.rebec_name(ev.rebec, ev.rebec_class) + "." +
                model.method(ev.rebec_class, ev.method).name + "@" + std::to_string(ev.time.ticks());
        break;
      }
    }
    if (!e.decision.empty()) {
      label += " [";
      for (std::size_t k = 0; k < e.decision.size(); ++k) {
        if (k) label += ",";
        label += std::to_string(e.decision[k]);
      }
      label += "]";
    }
    os << "  s" << e.from << " -> s" << e.to << " [label=\"" << label << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace trebeca
