#include "model_gen.hpp"

#include <vector>

namespace tsupport {

using namespace trebeca;

namespace {

struct Var {
  std::string name;
  BaseType type;
};

struct Gen {
  std::mt19937_64& rng;
  const GenOptions& opt;
  Model m;

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }
  template <typename T>
  const T& one_of(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(pick(0, static_cast<int>(v.size()) - 1))];
  }

  // Scope of the method being generated.
  struct Scope {
    std::uint32_t cls = 0;
    std::vector<std::vector<Var>> blocks;
    int next_local = 0;
    std::vector<Var> visible(const ReactiveClassDef& c) const {
      std::vector<Var> out;
      for (const auto& b : blocks) out.insert(out.end(), b.begin(), b.end());
      for (const auto& v : c.state_vars) {
        if (!v.type.is_rebec()) out.push_back({v.name, *v.type.base});
      }
      return out;
    }
  };

  std::vector<std::string> env_names() const {
    std::vector<std::string> out;
    for (const auto& e : m.env_decls) out.push_back(e.name);
    return out;
  }

  Expr int_leaf(const std::vector<Var>& vars) {
    std::vector<std::string> ints;
    for (const auto& v : vars) {
      if (v.type != BaseType::Boolean) ints.push_back(v.name);
    }
    int k = pick(0, 9);
    if (k < 4 || (ints.empty() && k < 8)) return Expr::int_lit(pick(0, 5));
    if (k < 8) return Expr::var(one_of(ints));
    if (k == 8 && !m.env_decls.empty()) return Expr::var(one_of(env_names()));
    return Expr::now();
  }

  Expr int_expr(const std::vector<Var>& vars, int depth) {
    if (depth <= 0 || coin(0.4)) return int_leaf(vars);
    switch (pick(0, 5)) {
      case 0: return Expr::binary(BinaryOp::Add, int_expr(vars, depth - 1), int_expr(vars, depth - 1));
      case 1: return Expr::binary(BinaryOp::Sub, int_expr(vars, depth - 1), int_expr(vars, depth - 1));
      case 2: return Expr::binary(BinaryOp::Mul, int_expr(vars, depth - 1), Expr::int_lit(pick(0, 3)));
      case 3:
        return Expr::binary(coin() ? BinaryOp::Div : BinaryOp::Mod, int_expr(vars, depth - 1),
                            Expr::int_lit(pick(1, 3)));
      case 4: return Expr::unary(UnaryOp::Neg, int_expr(vars, depth - 1));
      default: return Expr::choice({int_expr(vars, depth - 1), int_expr(vars, depth - 1)});
    }
  }

  Expr bool_expr(const std::vector<Var>& vars, int depth) {
    std::vector<std::string> bools;
    for (const auto& v : vars) {
      if (v.type == BaseType::Boolean) bools.push_back(v.name);
    }
    if (depth <= 0 || coin(0.3)) {
      if (!bools.empty() && coin()) return Expr::var(one_of(bools));
      if (coin(0.3)) return Expr::bool_lit(coin());
      static const BinaryOp cmp[] = {BinaryOp::Eq, BinaryOp::Ne, BinaryOp::Lt,
                                     BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge};
      return Expr::binary(cmp[pick(0, 5)], int_expr(vars, 1), int_expr(vars, 1));
    }
    switch (pick(0, 3)) {
      case 0: return Expr::binary(BinaryOp::And, bool_expr(vars, depth - 1), bool_expr(vars, depth - 1));
      case 1: return Expr::binary(BinaryOp::Or, bool_expr(vars, depth - 1), bool_expr(vars, depth - 1));
      case 2: return Expr::unary(UnaryOp::Not, bool_expr(vars, depth - 1));
      default: return Expr::choice({bool_expr(vars, depth - 1), bool_expr(vars, depth - 1)});
    }
  }

  // Non-negative amounts for delay/after/deadline.
  Expr amount(int hi) {
    int k = pick(0, 5);
    if (k == 0 && !m.env_decls.empty()) return Expr::var(one_of(env_names()));
    if (k == 1) return Expr::choice({Expr::int_lit(pick(0, hi)), Expr::int_lit(pick(0, hi))});
    return Expr::int_lit(pick(0, hi));
  }

  Expr typed(const TypeRef& t, const std::vector<Var>& vars) {
    if (*t.base == BaseType::Boolean) return bool_expr(vars, opt.max_expr_depth);
    if (*t.base == BaseType::Time) return coin() ? Expr::now() : Expr::int_lit(pick(0, 5));
    return int_expr(vars, opt.max_expr_depth);
  }

  Stmt send(Scope& s, const std::vector<Var>& vars) {
    const auto& cls = m.classes[s.cls];
    Stmt st;
    st.kind = StmtKind::Send;
    std::uint32_t target_cls = s.cls;
    st.target = "self";
    std::vector<std::pair<std::string, std::string>> refs;  // name, class
    for (const auto& k : cls.known_rebecs) refs.emplace_back(k.name, k.type.class_name);
    for (const auto& v : cls.state_vars) {
      if (v.type.is_rebec()) refs.emplace_back(v.name, v.type.class_name);
    }
    if (!refs.empty() && coin(0.6)) {
      const auto& r = one_of(refs);
      st.target = r.first;
      for (std::uint32_t c = 0; c < m.classes.size(); ++c) {
        if (m.classes[c].name == r.second) target_cls = c;
      }
    }
    const auto& tc = m.classes[target_cls];
    std::vector<std::uint32_t> methods;
    for (std::uint32_t i = 0; i < tc.methods.size(); ++i) {
      if (tc.methods[i].name != "initial") methods.push_back(i);
    }
    if (methods.empty()) {
      Stmt d;
      d.kind = StmtKind::Delay;
      d.expr = amount(2);
      return d;
    }
    const auto& target = tc.methods[one_of(methods)];
    st.name = target.name;
    for (const auto& p : target.params) st.args.push_back(typed(p.type, vars));
    if (coin(0.6)) st.after = amount(3);
    if (coin(0.4)) st.deadline = amount(4);
    return st;
  }

  std::vector<Stmt> block(Scope& s, int depth, bool top) {
    s.blocks.emplace_back();
    std::vector<Stmt> out;
    int n = pick(top ? 1 : 0, opt.max_stmts);
    for (int i = 0; i < n; ++i) out.push_back(stmt(s, depth));
    s.blocks.pop_back();
    return out;
  }

  Stmt stmt(Scope& s, int depth) {
    const auto& cls = m.classes[s.cls];
    auto vars = s.visible(cls);
    int k = pick(0, 11);
    if (k <= 2) {
      Stmt st;
      st.kind = StmtKind::LocalDecl;
      st.target = "l" + std::to_string(s.next_local++);
      st.type = TypeRef::of(coin(0.7) ? BaseType::Int : BaseType::Boolean);
      if (coin(0.85)) st.expr = typed(st.type, vars);
      s.blocks.back().push_back({st.target, *st.type.base});
      return st;
    }
    if (k <= 4) {
      std::vector<Var> targets;
      for (const auto& b : s.blocks) targets.insert(targets.end(), b.begin(), b.end());
      for (const auto& v : cls.state_vars) {
        if (!v.type.is_rebec()) targets.push_back({v.name, *v.type.base});
      }
      if (!targets.empty()) {
        const auto& t = one_of(targets);
        Stmt st;
        st.kind = StmtKind::Assign;
        st.target = t.name;
        st.expr = typed(TypeRef::of(t.type), vars);
        return st;
      }
    }
    if (k == 5 && depth < opt.max_depth) {
      Stmt st;
      st.kind = StmtKind::If;
      st.expr = bool_expr(vars, opt.max_expr_depth);
      st.then_block = block(s, depth + 1, false);
      if (coin()) {
        st.has_else = true;
        st.else_block = block(s, depth + 1, false);
      }
      return st;
    }
    if (k == 6) {
      Stmt st;
      st.kind = StmtKind::Delay;
      st.expr = amount(2);
      return st;
    }
    if (k == 7 && opt.allow_new) {
      for (const auto& v : cls.state_vars) {
        if (v.type.is_rebec() && coin()) {
          Stmt st;
          st.kind = StmtKind::New;
          st.target = v.name;
          st.name = v.type.class_name;
          return st;
        }
      }
    }
    if (k == 8 && coin(0.2)) {
      Stmt st;
      st.kind = StmtKind::NowNoop;
      return st;
    }
    return send(s, vars);
  }

  void run() {
    int nclasses = pick(1, opt.max_classes);
    if (opt.allow_env) {
      int nenv = pick(0, 2);
      for (int i = 0; i < nenv; ++i) {
        m.env_decls.push_back(VarDecl{TypeRef::of(BaseType::Int), "e" + std::to_string(i), {}});
      }
    }
    // Declarations first so that sends can target any class.
    for (int c = 0; c < nclasses; ++c) {
      ReactiveClassDef cls;
      cls.name = "C" + std::to_string(c);
      m.classes.push_back(std::move(cls));
    }
    for (int c = 0; c < nclasses; ++c) {
      auto& cls = m.classes[static_cast<std::size_t>(c)];
      int nknown = pick(0, 2);
      for (int i = 0; i < nknown; ++i) {
        cls.known_rebecs.push_back(
            VarDecl{TypeRef::rebec("C" + std::to_string(pick(0, nclasses - 1))), "k" + std::to_string(i), {}});
      }
      int nvars = pick(0, 3);
      for (int i = 0; i < nvars; ++i) {
        static const BaseType types[] = {BaseType::Int, BaseType::Int, BaseType::Boolean, BaseType::Time};
        cls.state_vars.push_back(VarDecl{TypeRef::of(types[pick(0, 3)]), "v" + std::to_string(i), {}});
      }
      if (opt.allow_new && coin(0.5)) {
        cls.state_vars.push_back(
            VarDecl{TypeRef::rebec("C" + std::to_string(pick(0, nclasses - 1))), "r0", {}});
      }
      MethodDef init;
      init.name = "initial";
      cls.methods.push_back(std::move(init));
      int nm = pick(1, opt.max_methods);
      for (int i = 0; i < nm; ++i) {
        MethodDef md;
        md.name = "m" + std::to_string(i);
        int np = pick(0, 2);
        for (int p = 0; p < np; ++p) {
          md.params.push_back(
              VarDecl{TypeRef::of(coin(0.7) ? BaseType::Int : BaseType::Boolean), "p" + std::to_string(p), {}});
        }
        cls.methods.push_back(std::move(md));
      }
    }
    for (std::uint32_t c = 0; c < m.classes.size(); ++c) {
      for (auto& md : m.classes[c].methods) {
        Scope s;
        s.cls = c;
        s.blocks.emplace_back();
        for (const auto& p : md.params) s.blocks.back().push_back({p.name, *p.type.base});
        md.body = block(s, 0, true);
      }
    }
    // One instance per class; knowns go to the instance of their class.
    for (const auto& cls : m.classes) {
      InstanceDecl inst;
      inst.class_name = cls.name;
      inst.name = "r" + cls.name.substr(1);
      for (const auto& k : cls.known_rebecs) inst.known_args.push_back("r" + k.type.class_name.substr(1));
      std::size_t nctor = static_cast<std::size_t>(pick(0, static_cast<int>(cls.state_vars.size())));
      for (std::size_t a = 0; a < nctor; ++a) {
        const auto& t = cls.state_vars[a].type;
        if (t.is_rebec()) break;
        if (*t.base == BaseType::Boolean) {
          inst.ctor_args.push_back(Expr::bool_lit(coin()));
        } else if (!m.env_decls.empty() && *t.base == BaseType::Int && coin(0.3)) {
          inst.ctor_args.push_back(Expr::var(m.env_decls[0].name));
        } else {
          inst.ctor_args.push_back(Expr::int_lit(pick(0, 4)));
        }
      }
      m.main.push_back(std::move(inst));
    }
  }
};

}  // namespace

Model generate_model(std::mt19937_64& rng, const GenOptions& opt) {
  Gen g{rng, opt, {}};
  g.run();
  return std::move(g.m);
}

std::unordered_map<std::string, std::int64_t> generate_env(std::mt19937_64& rng, const Model& m) {
  std::unordered_map<std::string, std::int64_t> out;
  for (const auto& e : m.env_decls) out[e.name] = std::uniform_int_distribution<int>(0, 3)(rng);
  return out;
}

Expr generate_closed_int_expr(std::mt19937_64& rng, int depth) {
  GenOptions opt;
  Gen g{rng, opt, {}};
  return g.int_expr({}, depth);
}

}  // namespace tsupport
