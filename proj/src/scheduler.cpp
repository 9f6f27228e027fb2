#include "trebeca/scheduler.hpp"

#include <algorithm>
#include <stdexcept>

#include "trebeca/resolvers.hpp"

namespace trebeca {

bool eligible(const Message& msg, const SystemState& state, DeadlineCheck mode) {
  auto now = state.env(msg.receiver).now;
  if (mode == DeadlineCheck::Effective) now = max(msg.tt, now);
  return msg.dl.admits(now);
}

namespace {

StepOutcome finish(StepOutcome out, TerminationReason reason, const SystemState& state) {
  out.terminated = true;
  out.end.reason = reason;
  if (out.end.complete()) {
    out.end.covered_until = RunEnd::kEverything;
  } else {
    // Anything that happens later happens no earlier than the least pending tt.
    out.end.covered_until = state.bag.front().tt.ticks() - 1;
  }
  return out;
}

}  // namespace

StepOutcome scheduler_step(const RunContext& ctx, SystemState& state, const SchedulePolicy& policy,
                           ChoiceResolver& resolver, std::uint64_t step) {
  StepOutcome out;
  state.sort_bag();
  if (state.bag.empty()) return finish(std::move(out), TerminationReason::EmptyBag, state);
  if (policy.max_steps && step >= *policy.max_steps) {
    return finish(std::move(out), TerminationReason::MaxSteps, state);
  }
  if (policy.horizon && state.bag.front().tt > *policy.horizon) {
    return finish(std::move(out), TerminationReason::Horizon, state);
  }

  auto purge_time = state.bag.front().tt;
  std::vector<Message> kept;
  kept.reserve(state.bag.size());
  for (auto& m : state.bag) {
    if (eligible(m, state, policy.deadline_check)) {
      kept.push_back(std::move(m));
      continue;
    }
    TraceEvent ev;
    ev.kind = EventKind::MsgPurged;
    ev.rebec = m.receiver;
    ev.rebec_class = state.env(m.receiver).class_index;
    ev.method = m.method;
    ev.sender = m.sender;
    ev.sender_class = m.sender.is_live() ? state.env(m.sender).class_index : 0;
    ev.step = step;
    ev.time = purge_time;
    ev.tt = m.tt;
    ev.dl = m.dl;
    out.events.push_back(ev);
  }
  state.bag = std::move(kept);
  if (state.bag.empty()) return finish(std::move(out), TerminationReason::AllExpired, state);
  if (policy.horizon && state.bag.front().tt > *policy.horizon) {
    return finish(std::move(out), TerminationReason::Horizon, state);
  }

  // Distinct messages sharing the least tt, in canonical order. Identical
  // copies are interchangeable, so they count once.
  auto min_tt = state.bag.front().tt;
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < state.bag.size() && state.bag[i].tt == min_tt; ++i) {
    if (candidates.empty() || !(state.bag[candidates.back()] == state.bag[i])) {
      candidates.push_back(i);
    }
  }
  std::size_t pick = 0;
  if (candidates.size() > 1 && policy.tie_break != TieBreak::FixedOrder) {
    pick = resolver.choose(ChoiceSite::tie(), static_cast<std::uint32_t>(candidates.size()));
    if (pick >= candidates.size()) throw std::out_of_range("tie decision out of range");
  }
  auto idx = candidates[pick];
  out.selected = state.bag[idx];
  state.bag.erase(state.bag.begin() + static_cast<std::ptrdiff_t>(idx));
  out.selected_at = max(out.selected.tt, state.env(out.selected.receiver).now);

  auto fx = exec_method(ctx, out.selected, state, resolver, step);
  out.events.insert(out.events.end(), fx.events.begin(), fx.events.end());
  state.sort_bag();
  return out;
}

RunContext make_context(std::shared_ptr<const CheckedModel> model,
                        const std::unordered_map<std::string, std::int64_t>& bindings) {
  RunContext ctx;
  const auto& decls = model->model().env_decls;
  for (const auto& [name, v] : bindings) {
    if (!model->env_index(name)) {
      throw std::invalid_argument("unknown env variable '" + name + "'");
    }
  }
  for (const auto& d : decls) {
    auto it = bindings.find(d.name);
    if (it == bindings.end()) {
      throw std::invalid_argument("env variable '" + d.name + "' is not bound");
    }
    switch (*d.type.base) {
      case BaseType::Int: ctx.env.push_back(Value::integer(it->second)); break;
      case BaseType::Boolean: ctx.env.push_back(Value::boolean(it->second != 0)); break;
      case BaseType::Time:
        if (it->second < 0) {
          throw std::invalid_argument("env variable '" + d.name + "' is a time and cannot be negative");
        }
        ctx.env.push_back(Value::time(TimeValue::from(it->second)));
        break;
    }
  }
  ctx.model = std::move(model);
  return ctx;
}

SystemState initial_state(const RunContext& ctx, std::vector<TraceEvent>* events) {
  const auto& model = *ctx.model;
  const auto& main = model.model().main;
  SystemState state;
  for (std::uint32_t i = 0; i < main.size(); ++i) {
    const auto& inst = main[i];
    auto c = *model.class_index(inst.class_name);
    const auto& cls = model.cls(c);
    RebecEnv env;
    env.id = RebecId{i};
    env.class_index = c;
    for (const auto& k : inst.known_args) {
      env.known_rebecs.push_back(Value::rebec(RebecId{*model.instance_index(k)}));
    }
    for (const auto& v : cls.state_vars) env.state_vars.push_back(default_value(v.type));
    state.envs.push_back(std::move(env));
  }

  FirstResolver none;
  for (std::uint32_t i = 0; i < main.size(); ++i) {
    const auto& inst = main[i];
    auto c = state.envs[i].class_index;
    const auto& cls = model.cls(c);
    auto init = *model.initial_index(c);
    MethodFrame frame;
    frame.self = RebecId{i};
    frame.cls = c;
    frame.method = init;
    for (std::size_t a = 0; a < inst.ctor_args.size(); ++a) {
      Value v = eval_expr(ctx, inst.ctor_args[a], frame, state, none);
      const auto& t = cls.state_vars[a].type;
      if (!t.is_rebec() && *t.base == BaseType::Time) {
        if (v.as_int() < 0) {
          throw std::invalid_argument("constructor argument " + std::to_string(a + 1) + " of '" +
                                      inst.name + "' is a negative time");
        }
        v = Value::time(TimeValue::from(v.as_int()));
      } else if (!t.is_rebec() && *t.base == BaseType::Int) {
        v = Value::integer(v.as_int());
      }
      state.envs[i].state_vars[a] = v;
    }

    Message msg;
    msg.receiver = RebecId{i};
    msg.method = init;
    msg.sender = RebecId::external();
    state.bag.push_back(msg);
    if (events) {
      TraceEvent created;
      created.kind = EventKind::RebecCreated;
      created.rebec = RebecId{i};
      created.rebec_class = c;
      created.method = TraceEvent::kNoMethod;
      created.sender = RebecId::external();
      events->push_back(created);
      TraceEvent sent;
      sent.kind = EventKind::MsgSent;
      sent.rebec = RebecId{i};
      sent.rebec_class = c;
      sent.method = init;
      sent.sender = RebecId::external();
      sent.tt = msg.tt;
      sent.dl = msg.dl;
      events->push_back(sent);
    }
  }
  state.sort_bag();
  return state;
}

Trace run_with(const RunContext& ctx, ChoiceResolver& resolver, const SchedulePolicy& policy,
               SystemState* final_state) {
  if (!policy.horizon && !policy.max_steps) {
    throw std::invalid_argument("a run needs a horizon or a step bound");
  }
  Trace trace;
  trace.model = ctx.model;
  SystemState state = initial_state(ctx, &trace.events);
  RecordingResolver recorder(resolver);
  for (std::uint64_t step = 0;; ++step) {
    auto out = scheduler_step(ctx, state, policy, recorder, step);
    trace.events.insert(trace.events.end(), out.events.begin(), out.events.end());
    if (out.terminated) {
      trace.end = out.end;
      TraceEvent ended;
      ended.kind = EventKind::RunEnded;
      ended.reason = out.end.reason;
      ended.rebec = RebecId::external();
      ended.method = TraceEvent::kNoMethod;
      ended.step = step;
      if (!state.bag.empty()) {
        ended.time = state.bag.front().tt;
      } else if (!trace.events.empty()) {
        ended.time = trace.events.back().time;
      }
      trace.events.push_back(ended);
      break;
    }
    trace.decisions.push_back(recorder.take());
  }
  if (final_state) *final_state = std::move(state);
  return trace;
}

Trace run(const RunContext& ctx, std::uint64_t seed, const SchedulePolicy& policy) {
  SeededResolver resolver(seed);
  return run_with(ctx, resolver, policy);
}

}  // namespace trebeca
