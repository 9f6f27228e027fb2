#include <map>
#include <set>

#include "trebeca/parser.hpp"

namespace trebeca {
namespace {

// Static type used by the checker. Time is an alias of int here.
struct Ty {
  enum Kind { Int, Bool, Rebec, AnyRebec, Error } kind = Error;
  std::string cls;

  static Ty of(const TypeRef& t) {
    if (t.is_rebec()) return Ty{Rebec, t.class_name};
    return Ty{*t.base == BaseType::Boolean ? Bool : Int, {}};
  }
  bool is_rebec() const { return kind == Rebec || kind == AnyRebec; }
  std::string spelling() const {
    switch (kind) {
      case Int: return "int";
      case Bool: return "boolean";
      case Rebec: return cls;
      case AnyRebec: return "rebec";
      case Error: break;
    }
    return "<error>";
  }
};

// Whether a value of type `from` can be stored where `to` is expected.
bool assignable(const Ty& to, const Ty& from) {
  if (to.kind == Ty::Error || from.kind == Ty::Error) return true;
  if (to.kind == Ty::Rebec) {
    return from.kind == Ty::AnyRebec || (from.kind == Ty::Rebec && from.cls == to.cls);
  }
  if (to.kind == Ty::AnyRebec) return from.is_rebec();
  return to.kind == from.kind;
}

class Checker {
 public:
  explicit Checker(Model& m) : m_(m) {}

  Diagnostics run() {
    check_env();
    check_classes();
    for (std::uint32_t c = 0; c < m_.classes.size(); ++c) check_class_body(c);
    check_main();
    return std::move(diags_);
  }

 private:
  void error(SourcePos p, std::string msg) {
    diags_.push_back(ParseError{p, std::move(msg), Severity::Error});
  }
  void warning(SourcePos p, std::string msg) {
    diags_.push_back(ParseError{p, std::move(msg), Severity::Warning});
  }

  void check_env() {
    for (std::uint32_t i = 0; i < m_.env_decls.size(); ++i) {
      const auto& d = m_.env_decls[i];
      if (!envs_.emplace(d.name, i).second) {
        error(d.pos, "duplicate env variable '" + d.name + "'");
      }
    }
  }

  void check_type(const TypeRef& t, SourcePos p) {
    if (t.is_rebec() && !classes_.count(t.class_name)) {
      error(p, "unknown reactive class '" + t.class_name + "'");
    }
  }

  void check_classes() {
    for (std::uint32_t c = 0; c < m_.classes.size(); ++c) {
      const auto& cls = m_.classes[c];
      if (!classes_.emplace(cls.name, c).second) {
        error(cls.pos, "duplicate reactive class '" + cls.name + "'");
      }
    }
    for (auto& cls : m_.classes) {
      if (cls.queue_bound) {
        warning(cls.pos, "queue length of '" + cls.name + "' is ignored in timed models");
      }
      std::set<std::string> members;
      for (const auto* block : {&cls.known_rebecs, &cls.state_vars}) {
        for (const auto& d : *block) {
          check_type(d.type, d.pos);
          if (!members.insert(d.name).second) {
            error(d.pos, "duplicate variable '" + d.name + "' in class '" + cls.name + "'");
          }
        }
      }
      std::set<std::string> methods;
      bool has_initial = false;
      for (const auto& m : cls.methods) {
        if (!methods.insert(m.name).second) {
          error(m.pos, "duplicate message server '" + m.name + "' in class '" + cls.name + "'");
        }
        if (m.name == "initial") has_initial = true;
        for (const auto& p : m.params) check_type(p.type, p.pos);
      }
      if (!has_initial) {
        error(cls.pos, "reactive class '" + cls.name + "' has no 'initial' message server");
      }
    }
  }

  // Per-method state.
  struct MethodScope {
    std::uint32_t cls = 0;
    MethodDef* method = nullptr;
    std::vector<std::map<std::string, std::uint32_t>> blocks;
    std::uint32_t next_site = 0;
  };

  std::optional<std::uint32_t> find_local(const MethodScope& s, const std::string& name) const {
    for (auto it = s.blocks.rbegin(); it != s.blocks.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return f->second;
    }
    return std::nullopt;
  }

  template <typename Vec>
  static std::optional<std::uint32_t> find_decl(const Vec& decls, const std::string& name) {
    for (std::uint32_t i = 0; i < decls.size(); ++i) {
      if (decls[i].name == name) return i;
    }
    return std::nullopt;
  }

  // Resolves a name and returns its type; Error when unknown.
  Ty resolve(MethodScope& s, const std::string& name, VarSlot& slot, SourcePos p) {
    const auto& cls = m_.classes[s.cls];
    if (auto l = find_local(s, name)) {
      slot = {VarScope::Local, *l};
      return Ty::of(s.method->frame_types[*l]);
    }
    if (auto v = find_decl(cls.state_vars, name)) {
      slot = {VarScope::StateVar, *v};
      return Ty::of(cls.state_vars[*v].type);
    }
    if (auto k = find_decl(cls.known_rebecs, name)) {
      slot = {VarScope::KnownRebec, *k};
      return Ty::of(cls.known_rebecs[*k].type);
    }
    if (auto e = envs_.find(name); e != envs_.end()) {
      slot = {VarScope::EnvVar, e->second};
      return Ty::of(m_.env_decls[e->second].type);
    }
    error(p, "unknown name '" + name + "'");
    return Ty{};
  }

  void expect_ty(const Ty& got, Ty::Kind want, SourcePos p, const std::string& what) {
    if (got.kind == Ty::Error || got.kind == want) return;
    error(p, what + " must be " + Ty{want, {}}.spelling() + ", found " + got.spelling());
  }

  Ty check_expr(MethodScope& s, Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit: return Ty{Ty::Int, {}};
      case ExprKind::BoolLit: return Ty{Ty::Bool, {}};
      case ExprKind::Now: return Ty{Ty::Int, {}};
      case ExprKind::Sender: return Ty{Ty::AnyRebec, {}};
      case ExprKind::Self: return Ty{Ty::Rebec, m_.classes[s.cls].name};
      case ExprKind::Var: return resolve(s, e.name, e.slot, e.pos);
      case ExprKind::Unary: {
        Ty t = check_expr(s, e.operands[0]);
        if (e.uop == UnaryOp::Not) {
          expect_ty(t, Ty::Bool, e.pos, "operand of '!'");
          return Ty{Ty::Bool, {}};
        }
        expect_ty(t, Ty::Int, e.pos, "operand of unary '-'");
        return Ty{Ty::Int, {}};
      }
      case ExprKind::Binary: {
        Ty a = check_expr(s, e.operands[0]);
        Ty b = check_expr(s, e.operands[1]);
        std::string what = std::string("operand of '") + binary_op_spelling(e.bop) + "'";
        switch (e.bop) {
          case BinaryOp::Or:
          case BinaryOp::And:
            expect_ty(a, Ty::Bool, e.pos, what);
            expect_ty(b, Ty::Bool, e.pos, what);
            return Ty{Ty::Bool, {}};
          case BinaryOp::Eq:
          case BinaryOp::Ne:
            if (a.kind != Ty::Error && b.kind != Ty::Error &&
                !(a.is_rebec() && b.is_rebec()) && a.kind != b.kind) {
              error(e.pos, "cannot compare " + a.spelling() + " with " + b.spelling());
            }
            return Ty{Ty::Bool, {}};
          case BinaryOp::Lt:
          case BinaryOp::Le:
          case BinaryOp::Gt:
          case BinaryOp::Ge:
            expect_ty(a, Ty::Int, e.pos, what);
            expect_ty(b, Ty::Int, e.pos, what);
            return Ty{Ty::Bool, {}};
          default:
            expect_ty(a, Ty::Int, e.pos, what);
            expect_ty(b, Ty::Int, e.pos, what);
            return Ty{Ty::Int, {}};
        }
      }
      case ExprKind::NondetChoice: {
        e.site = s.next_site++;
        Ty first;
        for (std::size_t i = 0; i < e.operands.size(); ++i) {
          Ty t = check_expr(s, e.operands[i]);
          if (i == 0) {
            first = t;
          } else if (!assignable(first, t) && !assignable(t, first)) {
            error(e.operands[i].pos, "alternatives of '?' must have the same type");
          }
        }
        return first;
      }
    }
    return Ty{};
  }

  void check_args(MethodScope& s, std::vector<Expr>& args, const MethodDef& target,
                  SourcePos p, const std::string& what) {
    if (args.size() != target.params.size()) {
      error(p, what + " expects " + std::to_string(target.params.size()) + " argument(s), got " +
                   std::to_string(args.size()));
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
      Ty t = check_expr(s, args[i]);
      if (i < target.params.size() && !assignable(Ty::of(target.params[i].type), t)) {
        error(args[i].pos, "argument " + std::to_string(i + 1) + " of " + what + " must be " +
                               target.params[i].type.spelling() + ", found " + t.spelling());
      }
    }
  }

  void check_block(MethodScope& s, std::vector<Stmt>& block) {
    s.blocks.emplace_back();
    for (auto& st : block) check_stmt(s, st);
    s.blocks.pop_back();
  }

  void check_stmt(MethodScope& s, Stmt& st) {
    switch (st.kind) {
      case StmtKind::NowNoop: return;
      case StmtKind::LocalDecl: {
        check_type(st.type, st.pos);
        if (st.expr) {
          Ty t = check_expr(s, *st.expr);
          if (!assignable(Ty::of(st.type), t)) {
            error(st.expr->pos, "cannot initialise " + st.type.spelling() + " '" + st.target +
                                    "' with " + t.spelling());
          }
        }
        if (find_local(s, st.target)) {
          error(st.pos, "'" + st.target + "' is already declared in this message server");
        }
        auto idx = static_cast<std::uint32_t>(s.method->frame_types.size());
        s.method->frame_types.push_back(st.type);
        s.blocks.back().emplace(st.target, idx);
        st.target_slot = {VarScope::Local, idx};
        return;
      }
      case StmtKind::Assign: {
        Ty rhs = check_expr(s, *st.expr);
        Ty lhs = resolve(s, st.target, st.target_slot, st.pos);
        check_assignable_target(st);
        if (!assignable(lhs, rhs)) {
          error(st.pos, "cannot assign " + rhs.spelling() + " to '" + st.target + "' of type " +
                            lhs.spelling());
        }
        return;
      }
      case StmtKind::New: {
        Ty lhs = resolve(s, st.target, st.target_slot, st.pos);
        check_assignable_target(st);
        auto c = classes_.find(st.name);
        if (c == classes_.end()) {
          error(st.pos, "unknown reactive class '" + st.name + "'");
          for (auto& a : st.args) check_expr(s, a);
          return;
        }
        st.class_index = c->second;
        if (lhs.kind != Ty::Error && !assignable(lhs, Ty{Ty::Rebec, st.name})) {
          error(st.pos, "cannot assign a new " + st.name + " to '" + st.target + "' of type " +
                            lhs.spelling());
        }
        const auto& cls = m_.classes[c->second];
        for (const auto& m : cls.methods) {
          if (m.name == "initial") {
            check_args(s, st.args, m, st.pos, "'new " + st.name + "'");
            return;
          }
        }
        for (auto& a : st.args) check_expr(s, a);
        return;
      }
      case StmtKind::Send: {
        Ty target;
        if (st.target == "self") {
          st.target_is_self = true;
          target = Ty{Ty::Rebec, m_.classes[s.cls].name};
        } else {
          target = resolve(s, st.target, st.target_slot, st.pos);
          if (target.kind != Ty::Error && target.kind != Ty::Rebec) {
            error(st.pos, "'" + st.target + "' is not a rebec reference");
            target = Ty{};
          }
        }
        if (st.after) expect_ty(check_expr(s, *st.after), Ty::Int, st.after->pos, "'after' value");
        if (st.deadline) {
          expect_ty(check_expr(s, *st.deadline), Ty::Int, st.deadline->pos, "'deadline' value");
        }
        if (target.kind != Ty::Rebec) {
          for (auto& a : st.args) check_expr(s, a);
          return;
        }
        auto c = classes_.find(target.cls);
        if (c == classes_.end()) {
          for (auto& a : st.args) check_expr(s, a);
          return;
        }
        st.class_index = c->second;
        const auto& cls = m_.classes[c->second];
        for (std::uint32_t m = 0; m < cls.methods.size(); ++m) {
          if (cls.methods[m].name == st.name) {
            st.method_index = m;
            check_args(s, st.args, cls.methods[m], st.pos,
                       "'" + target.cls + "." + st.name + "'");
            return;
          }
        }
        error(st.pos, "class '" + target.cls + "' has no message server '" + st.name + "'");
        for (auto& a : st.args) check_expr(s, a);
        return;
      }
      case StmtKind::If: {
        expect_ty(check_expr(s, *st.expr), Ty::Bool, st.expr->pos, "condition");
        check_block(s, st.then_block);
        if (st.has_else) check_block(s, st.else_block);
        return;
      }
      case StmtKind::Delay:
        expect_ty(check_expr(s, *st.expr), Ty::Int, st.expr->pos, "delay amount");
        return;
    }
  }

  void check_assignable_target(const Stmt& st) {
    switch (st.target_slot.scope) {
      case VarScope::KnownRebec:
        error(st.pos, "known rebec '" + st.target + "' cannot be reassigned");
        break;
      case VarScope::EnvVar:
        error(st.pos, "env variable '" + st.target + "' is read-only");
        break;
      default: break;
    }
  }

  void check_class_body(std::uint32_t c) {
    auto& cls = m_.classes[c];
    for (auto& m : cls.methods) {
      MethodScope s;
      s.cls = c;
      s.method = &m;
      m.frame_types.clear();
      s.blocks.emplace_back();
      for (const auto& p : m.params) {
        if (s.blocks.back().count(p.name)) {
          error(p.pos, "duplicate parameter '" + p.name + "'");
          continue;
        }
        auto idx = static_cast<std::uint32_t>(m.frame_types.size());
        m.frame_types.push_back(p.type);
        s.blocks.back().emplace(p.name, idx);
      }
      // Parameters that collide are still given a slot so argument positions
      // stay aligned with frame slots.
      while (m.frame_types.size() < m.params.size()) {
        m.frame_types.push_back(m.params[m.frame_types.size()].type);
      }
      check_block(s, m.body);
    }
  }

  void check_main() {
    std::map<std::string, std::uint32_t> instances;
    for (std::uint32_t i = 0; i < m_.main.size(); ++i) {
      auto& inst = m_.main[i];
      if (!instances.emplace(inst.name, i).second) {
        error(inst.pos, "duplicate instance name '" + inst.name + "'");
      }
    }
    if (m_.main.empty()) error({1, 1}, "main block declares no rebecs");
    for (auto& inst : m_.main) {
      auto c = classes_.find(inst.class_name);
      if (c == classes_.end()) {
        error(inst.pos, "unknown reactive class '" + inst.class_name + "'");
        continue;
      }
      const auto& cls = m_.classes[c->second];
      if (inst.known_args.size() != cls.known_rebecs.size()) {
        error(inst.pos, "'" + inst.name + "' needs " + std::to_string(cls.known_rebecs.size()) +
                            " known rebec(s), got " + std::to_string(inst.known_args.size()));
      }
      for (std::size_t k = 0; k < inst.known_args.size(); ++k) {
        auto it = instances.find(inst.known_args[k]);
        if (it == instances.end()) {
          error(inst.pos, "unknown instance '" + inst.known_args[k] + "'");
          continue;
        }
        if (k < cls.known_rebecs.size() &&
            cls.known_rebecs[k].type.class_name != m_.main[it->second].class_name) {
          error(inst.pos, "known rebec '" + cls.known_rebecs[k].name + "' of '" + inst.name +
                              "' must be a " + cls.known_rebecs[k].type.class_name + ", got " +
                              m_.main[it->second].class_name + " '" + inst.known_args[k] + "'");
        }
      }
      if (inst.ctor_args.size() > cls.state_vars.size()) {
        error(inst.pos, "'" + inst.name + "' has " + std::to_string(cls.state_vars.size()) +
                            " state variable(s) but " + std::to_string(inst.ctor_args.size()) +
                            " constructor argument(s)");
      }
      for (std::size_t a = 0; a < inst.ctor_args.size(); ++a) {
        Ty t = check_constant(inst.ctor_args[a]);
        if (a < cls.state_vars.size() && !assignable(Ty::of(cls.state_vars[a].type), t)) {
          error(inst.ctor_args[a].pos, "constructor argument " + std::to_string(a + 1) + " of '" +
                                           inst.name + "' must be " +
                                           cls.state_vars[a].type.spelling() + ", found " +
                                           t.spelling());
        }
      }
      for (const auto& m : cls.methods) {
        if (m.name == "initial" && !m.params.empty()) {
          error(inst.pos, "'" + inst.name + "' is created in main, so 'initial' of '" +
                              cls.name + "' must take no parameters");
        }
      }
    }
  }

  // Constructor arguments are literals, env variables, or arithmetic over them.
  Ty check_constant(Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit: return Ty{Ty::Int, {}};
      case ExprKind::BoolLit: return Ty{Ty::Bool, {}};
      case ExprKind::Var: {
        auto it = envs_.find(e.name);
        if (it == envs_.end()) {
          error(e.pos, "constructor arguments may only use literals and env variables; '" +
                           e.name + "' is not an env variable");
          return Ty{};
        }
        e.slot = {VarScope::EnvVar, it->second};
        return Ty::of(m_.env_decls[it->second].type);
      }
      case ExprKind::Unary: {
        Ty t = check_constant(e.operands[0]);
        return e.uop == UnaryOp::Not ? Ty{Ty::Bool, {}} : (t.kind == Ty::Error ? t : Ty{Ty::Int, {}});
      }
      case ExprKind::Binary: {
        Ty a = check_constant(e.operands[0]);
        Ty b = check_constant(e.operands[1]);
        if (a.kind == Ty::Error || b.kind == Ty::Error) return Ty{};
        switch (e.bop) {
          case BinaryOp::Add:
          case BinaryOp::Sub:
          case BinaryOp::Mul:
          case BinaryOp::Div:
          case BinaryOp::Mod: return Ty{Ty::Int, {}};
          default: return Ty{Ty::Bool, {}};
        }
      }
      default:
        error(e.pos, "constructor arguments may only use literals and env variables");
        return Ty{};
    }
  }

  Model& m_;
  Diagnostics diags_;
  std::map<std::string, std::uint32_t> envs_;
  std::map<std::string, std::uint32_t> classes_;
};

}  // namespace

CheckResult validate_model(Model model) {
  CheckResult r;
  r.diagnostics = Checker(model).run();
  if (!has_errors(r.diagnostics)) {
    r.model = std::make_shared<const CheckedModel>(std::move(model));
  }
  return r;
}

}  // namespace trebeca
