#include <algorithm>
#include <random>
#include <set>
#include <tuple>

#include "checks.hpp"
#include "model_gen.hpp"
#include "test_support.hpp"
#include "trebeca/explorer.hpp"
#include "trebeca/monitor.hpp"
#include "trebeca/parser.hpp"
#include "trebeca/pretty.hpp"
#include "trebeca/resolvers.hpp"
#include "trebeca/scheduler.hpp"

namespace tsupport {

using namespace trebeca;

namespace {

struct Generated {
  std::string text;
  RunContext ctx;
};

// Generated models are printed and re-loaded so that they go through the
// same front end as files.
std::optional<Generated> generate(std::mt19937_64& rng, bool allow_new, CheckReport& r, int i) {
  GenOptions opt;
  opt.allow_new = allow_new;
  auto m = generate_model(rng, opt);
  auto env = generate_env(rng, m);
  Generated g;
  g.text = pretty_print(m);
  auto loaded = load_model(g.text);
  r.expect(loaded.model != nullptr, "generated model " + std::to_string(i) + " does not load:\n" + g.text);
  if (!loaded.model) return std::nullopt;
  g.ctx = make_context(loaded.model, env);
  return g;
}

using MsgTuple = std::tuple<std::uint32_t, std::uint32_t, std::int64_t, std::int64_t>;

MsgTuple tuple_of(RebecId receiver, std::uint32_t method, TimeValue tt, Deadline dl) {
  return {receiver.value, method, tt.ticks(), dl.is_infinite() ? -1 : dl.value().ticks()};
}

}  // namespace

CheckReport scheduler_properties(int models, std::uint64_t seed, PropertyStats* stats) {
  CheckReport r;
  PropertyStats local;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < models; ++i) {
    auto g = generate(rng, i % 3 == 0, r, i);
    if (!g) continue;
    ++local.models;
    const auto& ctx = g->ctx;
    auto where = [&](const std::string& what) { return "model " + std::to_string(i) + ": " + what; };

    SchedulePolicy policy;
    policy.horizon = TimeValue::from(15);
    policy.max_steps = 80;
    policy.deadline_check = i % 2 ? DeadlineCheck::Effective : DeadlineCheck::Literal;
    SeededResolver res(seed + static_cast<std::uint64_t>(i));
    SystemState state = initial_state(ctx);
    TimeValue last_tt = TimeValue::zero();
    for (std::uint64_t step = 0;; ++step) {
      SystemState pre = state;
      pre.sort_bag();
      StepOutcome out;
      try {
        out = scheduler_step(ctx, state, policy, res, step);
      } catch (const RuntimeError&) {
        ++local.runtime_errors;
        break;
      }

      // Purge soundness: exactly the ineligible messages go, and only when
      // the scheduler got as far as purging.
      std::vector<MsgTuple> purged, expected;
      for (const auto& ev : out.events) {
        if (ev.kind == EventKind::MsgPurged) purged.push_back(tuple_of(ev.rebec, ev.method, *ev.tt, *ev.dl));
      }
      bool purging = !pre.bag.empty() && !(policy.max_steps && step >= *policy.max_steps) &&
                     !(policy.horizon && pre.bag.front().tt > *policy.horizon);
      if (purging) {
        for (const auto& m : pre.bag) {
          if (!eligible(m, pre, policy.deadline_check)) expected.push_back(tuple_of(m.receiver, m.method, m.tt, m.dl));
        }
      }
      std::sort(purged.begin(), purged.end());
      std::sort(expected.begin(), expected.end());
      r.expect(purged == expected, where("purged set differs from the ineligible set"));
      local.purges += purged.size();
      // A purged message could never become eligible: the receiver's clock
      // only grows.
      for (const auto& [rcv, method, tt, dl] : purged) {
        r.expect(dl >= 0 && dl < std::max(pre.envs[rcv].now.ticks(),
                                          policy.deadline_check == DeadlineCheck::Effective ? tt : 0),
                 where("purged message was still admissible"));
      }
      if (out.terminated) break;
      ++local.steps;

      const auto& sel = out.selected;
      r.expect(sel.tt >= last_tt, where("selected tt went backwards"));
      last_tt = sel.tt;
      for (const auto& m : pre.bag) {
        if (eligible(m, pre, policy.deadline_check)) {
          r.expect(sel.tt <= m.tt, where("an eligible message had a smaller tt than the selected one"));
        }
      }
      auto start = max(sel.tt, pre.env(sel.receiver).now);
      r.expect(out.selected_at == start, where("method started at the wrong time"));
      for (std::size_t id = 0; id < pre.envs.size(); ++id) {
        auto before = pre.envs[id].now;
        auto after = state.envs[id].now;
        if (RebecId{static_cast<std::uint32_t>(id)} == sel.receiver) {
          r.expect(after >= start, where("receiver clock went backwards"));
        } else {
          r.expect(after == before, where("idle rebec's clock moved"));
          r.expect(state.envs[id].state_vars == pre.envs[id].state_vars, where("idle rebec's state changed"));
        }
      }
      // Within the step, clocks read by events never decrease.
      TimeValue seen = start;
      for (const auto& ev : out.events) {
        if (ev.kind == EventKind::MsgPurged || ev.kind == EventKind::MsgSelected) continue;
        r.expect(ev.time >= seen, where("event time decreased inside a method"));
        seen = ev.time;
      }
      // Messages produced by this step carry tt >= their sending time.
      for (const auto& m : state.bag) r.expect(m.tt >= TimeValue::zero(), where("negative tt"));
    }
  }
  if (stats) {
    stats->models += local.models;
    stats->steps += local.steps;
    stats->purges += local.purges;
    stats->runtime_errors += local.runtime_errors;
  }
  return r;
}

CheckReport explorer_order_independence(int models, std::uint64_t seed, PropertyStats* stats) {
  CheckReport r;
  std::mt19937_64 rng(seed);
  std::size_t compared = 0;
  for (int i = 0; i < models; ++i) {
    auto g = generate(rng, i % 3 == 0, r, i);
    if (!g) continue;
    ExploreOptions base;
    base.bounds.horizon = TimeValue::from(5);
    base.bounds.max_states = 1500;
    auto a = explore(g->ctx, base);
    if (a.state_limit_hit) continue;
    auto keys = [](const ExploreResult& x) {
      std::set<std::string> s;
      for (const auto& st : x.states) s.insert(st.key);
      return s;
    };
    auto ka = keys(a);
    auto shuffled = base;
    shuffled.shuffle_seed = seed ^ static_cast<std::uint64_t>(i);
    auto b = explore(g->ctx, shuffled);
    auto threaded = base;
    threaded.workers = 2;
    threaded.shuffle_seed = static_cast<std::uint64_t>(i);
    auto c = explore(g->ctx, threaded);
    r.expect(!b.state_limit_hit && keys(b) == ka, "model " + std::to_string(i) + ": shuffled order changed the state set");
    r.expect(!c.state_limit_hit && keys(c) == ka, "model " + std::to_string(i) + ": two workers changed the state set");
    r.expect(b.edges.size() == a.edges.size() && c.edges.size() == a.edges.size(),
             "model " + std::to_string(i) + ": edge count depends on order");
    ++compared;
  }
  r.expect(compared * 2 >= static_cast<std::size_t>(models), "fewer than half of the models were compared");
  if (stats) stats->explored += compared;
  return r;
}

CheckReport random_containment(int models, std::uint64_t seed) {
  CheckReport r;
  std::mt19937_64 rng(seed);
  auto spec = parse_monitor(
      "EVENTUALLY selected *.m0 WITHIN 4\n"
      "NEVER purged *.*\n"
      "ALWAYS-PRECEDES(selected *.m0, selected *.m1)\n");
  for (int i = 0; i < models; ++i) {
    auto g = generate(rng, false, r, i);
    if (!g) continue;
    ExploreOptions opt;
    opt.bounds.horizon = TimeValue::from(6);
    opt.bounds.max_states = 3000;
    auto graph = explore(g->ctx, opt);
    if (graph.state_limit_hit) continue;
    auto gv = check_graph(graph, spec);
    SchedulePolicy policy;
    policy.horizon = TimeValue::from(6);
    policy.max_steps = 2000;
    for (std::uint64_t s = 0; s < 3; ++s) {
      SteppedRun run;
      Trace t;
      try {
        run = stepped_run(g->ctx, s, policy);
        t = trebeca::run(g->ctx, s, policy);
      } catch (const RuntimeError&) {
        continue;
      }
      if (run.end.reason == TerminationReason::MaxSteps) continue;
      auto where = "model " + std::to_string(i) + " seed " + std::to_string(s);
      auto reached = follow_path(graph, t.decisions);
      r.expect(run.decisions == t.decisions, where + ": stepping by hand changed the run");
      r.expect(reached && graph.states[*reached].key == state_key(run.last) &&
                   same_events_ignoring_step(graph.states[*reached].terminal_events, run.final_events),
               where + ": run is not a graph path");
      auto tv = check_trace(t, spec);
      auto rv = check_trace(replay(g->ctx, graph, t.decisions), spec);
      for (std::size_t c = 0; c < spec.clauses.size(); ++c) {
        r.expect(tv.clauses[c].value == rv.clauses[c].value, where + ": replay changed a verdict");
        if (tv.clauses[c].value == VerdictValue::Pass) {
          r.expect(gv.exists.clauses[c].value == VerdictValue::Pass, where + ": passing run but exists does not pass");
        }
        if (tv.clauses[c].value == VerdictValue::Fail) {
          r.expect(gv.forall.clauses[c].value == VerdictValue::Fail, where + ": failing run but forall does not fail");
        }
      }
    }
  }
  return r;
}

}  // namespace tsupport
