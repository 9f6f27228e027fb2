#include "trebeca/interpreter.hpp"

#include <limits>

namespace trebeca {

namespace {

std::string format_runtime_error(const std::string& message, const std::string& rebec,
                                 const std::string& method, SourcePos pos) {
  return "runtime error in " + rebec + "." + method + " at line " + std::to_string(pos.line) +
         ": " + message;
}

[[noreturn]] void raise(const RunContext& ctx, const MethodFrame& frame, SourcePos pos,
                        const std::string& message) {
  const auto& m = *ctx.model;
  throw RuntimeError(message, m.rebec_name(frame.self, frame.cls),
                     m.method(frame.cls, frame.method).name, pos);
}

// Converts a value to the representation of its declared type so that equal
// states serialize identically.
Value coerce(const RunContext& ctx, const MethodFrame& frame, SourcePos pos, const TypeRef& t,
             Value v) {
  if (t.is_rebec() || !v.is_numeric()) return v;
  if (*t.base == BaseType::Time) {
    if (v.as_int() < 0) {
      raise(ctx, frame, pos, "negative value " + std::to_string(v.as_int()) + " stored in a time");
    }
    return Value::time(TimeValue::from(v.as_int()));
  }
  if (*t.base == BaseType::Int) return Value::integer(v.as_int());
  return v;
}

void check_overflow(const RunContext& ctx, const MethodFrame& frame, SourcePos pos, bool overflow) {
  if (overflow) raise(ctx, frame, pos, "integer overflow");
}

std::int64_t offset_value(const RunContext& ctx, const MethodFrame& frame, const Expr& e,
                          const SystemState& state, ChoiceResolver& resolver,
                          const char* what) {
  auto v = eval_expr(ctx, e, frame, state, resolver).as_int();
  if (v < 0) {
    raise(ctx, frame, e.pos, std::string("negative ") + what + " " + std::to_string(v));
  }
  return v;
}

TimeValue add_time(const RunContext& ctx, const MethodFrame& frame, SourcePos pos, TimeValue t,
                   std::int64_t d) {
  try {
    return t.plus(d);
  } catch (const TimeOverflow& ex) {
    raise(ctx, frame, pos, ex.what());
  }
}

const TypeRef& slot_type(const RunContext& ctx, const MethodFrame& frame, const SystemState& state,
                         VarSlot slot) {
  const auto& m = *ctx.model;
  switch (slot.scope) {
    case VarScope::Local: return m.method(frame.cls, frame.method).frame_types[slot.index];
    case VarScope::StateVar: return m.cls(state.env(frame.self).class_index).state_vars[slot.index].type;
    case VarScope::KnownRebec:
      return m.cls(state.env(frame.self).class_index).known_rebecs[slot.index].type;
    case VarScope::EnvVar: return m.model().env_decls[slot.index].type;
    case VarScope::Unresolved: break;
  }
  throw std::logic_error("unresolved variable slot");
}

void store(const RunContext& ctx, MethodFrame& frame, SystemState& state, const Stmt& s, Value v) {
  v = coerce(ctx, frame, s.pos, slot_type(ctx, frame, state, s.target_slot), v);
  switch (s.target_slot.scope) {
    case VarScope::Local: frame.locals[s.target_slot.index] = v; return;
    case VarScope::StateVar: state.env(frame.self).state_vars[s.target_slot.index] = v; return;
    default: throw std::logic_error("assignment to a read-only slot");
  }
}

void exec_block(const RunContext& ctx, const std::vector<Stmt>& block, MethodFrame& frame,
                SystemState& state, ChoiceResolver& resolver, ExecEffects& fx) {
  for (const auto& s : block) {
    auto part = exec_stmt(ctx, s, frame, state, resolver);
    fx.sent.insert(fx.sent.end(), part.sent.begin(), part.sent.end());
    fx.created.insert(fx.created.end(), part.created.begin(), part.created.end());
    fx.events.insert(fx.events.end(), part.events.begin(), part.events.end());
  }
}

}  // namespace

RuntimeError::RuntimeError(const std::string& message, std::string rebec, std::string method,
                           SourcePos pos)
    : std::runtime_error(format_runtime_error(message, rebec, method, pos)),
      detail_(message),
      rebec_(std::move(rebec)),
      method_(std::move(method)),
      pos_(pos) {}

Value default_value(const TypeRef& t) {
  if (t.is_rebec()) return Value::rebec(RebecId::unbound());
  switch (*t.base) {
    case BaseType::Int: return Value::integer(0);
    case BaseType::Boolean: return Value::boolean(false);
    case BaseType::Time: return Value::time(TimeValue::zero());
  }
  return Value{};
}

Value eval_expr(const RunContext& ctx, const Expr& e, const MethodFrame& frame,
                const SystemState& state, ChoiceResolver& resolver) {
  switch (e.kind) {
    case ExprKind::IntLit: return Value::integer(e.int_value);
    case ExprKind::BoolLit: return Value::boolean(e.int_value != 0);
    case ExprKind::Now: return Value::time(state.env(frame.self).now);
    case ExprKind::Sender: return Value::rebec(frame.sender);
    case ExprKind::Self: return Value::rebec(frame.self);
    case ExprKind::Var:
      switch (e.slot.scope) {
        case VarScope::Local: return frame.locals[e.slot.index];
        case VarScope::StateVar: return state.env(frame.self).state_vars[e.slot.index];
        case VarScope::KnownRebec: return state.env(frame.self).known_rebecs[e.slot.index];
        case VarScope::EnvVar: return ctx.env[e.slot.index];
        case VarScope::Unresolved: break;
      }
      raise(ctx, frame, e.pos, "unresolved name '" + e.name + "'");
    case ExprKind::Unary: {
      Value v = eval_expr(ctx, e.operands[0], frame, state, resolver);
      if (e.uop == UnaryOp::Not) return Value::boolean(!v.as_bool());
      std::int64_t r = 0;
      check_overflow(ctx, frame, e.pos, __builtin_sub_overflow(0, v.as_int(), &r));
      return Value::integer(r);
    }
    case ExprKind::NondetChoice: {
      auto n = static_cast<std::uint32_t>(e.operands.size());
      auto pick = resolver.choose(ChoiceSite{frame.cls, frame.method, e.site}, n);
      if (pick >= n) raise(ctx, frame, e.pos, "choice resolver returned an out-of-range index");
      return eval_expr(ctx, e.operands[pick], frame, state, resolver);
    }
    case ExprKind::Binary: break;
  }

  Value a = eval_expr(ctx, e.operands[0], frame, state, resolver);
  if (e.bop == BinaryOp::And && !a.as_bool()) return Value::boolean(false);
  if (e.bop == BinaryOp::Or && a.as_bool()) return Value::boolean(true);
  Value b = eval_expr(ctx, e.operands[1], frame, state, resolver);
  std::int64_t x = a.as_int();
  std::int64_t y = b.as_int();
  std::int64_t r = 0;
  switch (e.bop) {
    case BinaryOp::And:
    case BinaryOp::Or: return Value::boolean(b.as_bool());
    case BinaryOp::Eq: return Value::boolean(x == y);
    case BinaryOp::Ne: return Value::boolean(x != y);
    case BinaryOp::Lt: return Value::boolean(x < y);
    case BinaryOp::Le: return Value::boolean(x <= y);
    case BinaryOp::Gt: return Value::boolean(x > y);
    case BinaryOp::Ge: return Value::boolean(x >= y);
    case BinaryOp::Add:
      check_overflow(ctx, frame, e.pos, __builtin_add_overflow(x, y, &r));
      return Value::integer(r);
    case BinaryOp::Sub:
      check_overflow(ctx, frame, e.pos, __builtin_sub_overflow(x, y, &r));
      return Value::integer(r);
    case BinaryOp::Mul:
      check_overflow(ctx, frame, e.pos, __builtin_mul_overflow(x, y, &r));
      return Value::integer(r);
    case BinaryOp::Div:
    case BinaryOp::Mod:
      if (y == 0) raise(ctx, frame, e.pos, "division by zero");
      if (x == std::numeric_limits<std::int64_t>::min() && y == -1) {
        raise(ctx, frame, e.pos, "integer overflow");
      }
      return Value::integer(e.bop == BinaryOp::Div ? x / y : x % y);
  }
  return Value{};
}

ExecEffects exec_stmt(const RunContext& ctx, const Stmt& s, MethodFrame& frame, SystemState& state,
                      ChoiceResolver& resolver) {
  ExecEffects fx;
  const auto& model = *ctx.model;
  switch (s.kind) {
    case StmtKind::NowNoop: break;
    case StmtKind::LocalDecl:
      frame.locals[s.target_slot.index] =
          s.expr ? coerce(ctx, frame, s.pos, s.type, eval_expr(ctx, *s.expr, frame, state, resolver))
                 : default_value(s.type);
      break;
    case StmtKind::Assign: store(ctx, frame, state, s, eval_expr(ctx, *s.expr, frame, state, resolver)); break;
    case StmtKind::If:
      if (eval_expr(ctx, *s.expr, frame, state, resolver).as_bool()) {
        exec_block(ctx, s.then_block, frame, state, resolver, fx);
      } else if (s.has_else) {
        exec_block(ctx, s.else_block, frame, state, resolver, fx);
      }
      break;
    case StmtKind::Delay: {
      auto d = offset_value(ctx, frame, *s.expr, state, resolver, "delay");
      auto& env = state.env(frame.self);
      env.now = add_time(ctx, frame, s.pos, env.now, d);
      TraceEvent ev;
      ev.kind = EventKind::DelayExecuted;
      ev.rebec = frame.self;
      ev.rebec_class = frame.cls;
      ev.method = frame.method;
      ev.sender = frame.sender;
      ev.sender_class = frame.sender.is_live() ? state.env(frame.sender).class_index : 0;
      ev.time = env.now;
      fx.events.push_back(ev);
      break;
    }
    case StmtKind::Send: {
      RebecId receiver = frame.self;
      if (!s.target_is_self) {
        Value ref = Value::rebec(RebecId::unbound());
        switch (s.target_slot.scope) {
          case VarScope::Local: ref = frame.locals[s.target_slot.index]; break;
          case VarScope::StateVar: ref = state.env(frame.self).state_vars[s.target_slot.index]; break;
          case VarScope::KnownRebec:
            ref = state.env(frame.self).known_rebecs[s.target_slot.index];
            break;
          default: break;
        }
        receiver = ref.as_rebec();
        if (!receiver.is_live() || receiver.value >= state.envs.size()) {
          raise(ctx, frame, s.pos, "message '" + s.name + "' sent through unbound reference '" +
                                       s.target + "'");
        }
      }
      auto rcls = state.env(receiver).class_index;
      auto midx = s.method_index;
      if (rcls != s.class_index) {
        auto found = model.method_index(rcls, s.name);
        if (!found) {
          raise(ctx, frame, s.pos, "class '" + model.cls(rcls).name + "' has no message server '" +
                                       s.name + "'");
        }
        midx = *found;
      }
      const auto& target = model.method(rcls, midx);
      Message msg;
      msg.receiver = receiver;
      msg.method = midx;
      msg.sender = frame.self;
      for (std::size_t i = 0; i < s.args.size(); ++i) {
        msg.args.push_back(coerce(ctx, frame, s.args[i].pos, target.params[i].type,
                                  eval_expr(ctx, s.args[i], frame, state, resolver)));
      }
      auto now = state.env(frame.self).now;
      msg.tt = now;
      if (s.after) msg.tt = add_time(ctx, frame, s.pos, now, offset_value(ctx, frame, *s.after, state, resolver, "after value"));
      if (s.deadline) {
        msg.dl = Deadline::finite(add_time(
            ctx, frame, s.pos, now, offset_value(ctx, frame, *s.deadline, state, resolver, "deadline")));
      }
      TraceEvent ev;
      ev.kind = EventKind::MsgSent;
      ev.rebec = receiver;
      ev.rebec_class = rcls;
      ev.method = midx;
      ev.sender = frame.self;
      ev.sender_class = frame.cls;
      ev.time = now;
      ev.tt = msg.tt;
      ev.dl = msg.dl;
      fx.events.push_back(ev);
      state.bag.push_back(msg);
      fx.sent.push_back(std::move(msg));
      break;
    }
    case StmtKind::New: {
      const auto& cls = model.cls(s.class_index);
      auto init = model.initial_index(s.class_index);
      if (!init) raise(ctx, frame, s.pos, "class '" + cls.name + "' has no initial");
      const auto& init_def = model.method(s.class_index, *init);
      std::vector<Value> args;
      for (std::size_t i = 0; i < s.args.size(); ++i) {
        args.push_back(coerce(ctx, frame, s.args[i].pos, init_def.params[i].type,
                              eval_expr(ctx, s.args[i], frame, state, resolver)));
      }
      auto now = state.env(frame.self).now;
      RebecEnv env;
      env.id = state.next_fresh_id();
      env.class_index = s.class_index;
      env.now = now;
      for (const auto& v : cls.state_vars) env.state_vars.push_back(default_value(v.type));
      for (const auto& k : cls.known_rebecs) env.known_rebecs.push_back(default_value(k.type));
      auto id = env.id;
      state.envs.push_back(std::move(env));

      Message msg;
      msg.receiver = id;
      msg.method = *init;
      msg.args = std::move(args);
      msg.sender = id;
      msg.tt = now;
      state.bag.push_back(msg);
      fx.sent.push_back(msg);
      fx.created.push_back(id);

      TraceEvent created;
      created.kind = EventKind::RebecCreated;
      created.rebec = id;
      created.rebec_class = s.class_index;
      created.method = TraceEvent::kNoMethod;
      created.sender = frame.self;
      created.sender_class = frame.cls;
      created.time = now;
      fx.events.push_back(created);

      TraceEvent sent;
      sent.kind = EventKind::MsgSent;
      sent.rebec = id;
      sent.rebec_class = s.class_index;
      sent.method = *init;
      sent.sender = id;
      sent.sender_class = s.class_index;
      sent.time = now;
      sent.tt = msg.tt;
      sent.dl = msg.dl;
      fx.events.push_back(sent);

      store(ctx, frame, state, s, Value::rebec(id));
      break;
    }
  }
  return fx;
}

ExecEffects exec_method(const RunContext& ctx, const Message& msg, SystemState& state,
                        ChoiceResolver& resolver, std::uint64_t step) {
  auto& env = state.env(msg.receiver);
  env.now = max(msg.tt, env.now);
  MethodFrame frame;
  frame.self = msg.receiver;
  frame.sender = msg.sender;
  frame.cls = env.class_index;
  frame.method = msg.method;
  const auto& def = ctx.model->method(frame.cls, frame.method);
  frame.locals.reserve(def.frame_types.size());
  for (std::size_t i = 0; i < def.frame_types.size(); ++i) {
    frame.locals.push_back(i < msg.args.size() ? msg.args[i] : default_value(def.frame_types[i]));
  }

  ExecEffects fx;
  TraceEvent selected;
  selected.kind = EventKind::MsgSelected;
  selected.rebec = msg.receiver;
  selected.rebec_class = frame.cls;
  selected.method = frame.method;
  selected.sender = msg.sender;
  selected.sender_class = msg.sender.is_live() ? state.env(msg.sender).class_index : 0;
  selected.time = env.now;
  selected.tt = msg.tt;
  selected.dl = msg.dl;
  fx.events.push_back(selected);

  exec_block(ctx, def.body, frame, state, resolver, fx);
  for (auto& ev : fx.events) ev.step = step;
  return fx;
}

}  // namespace trebeca
