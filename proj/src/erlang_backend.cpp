#include "trebeca/erlang_backend.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace trebeca {

UnsupportedFeature::UnsupportedFeature(SourcePos pos, const std::string& what)
    : std::runtime_error("line " + std::to_string(pos.line) + ":" + std::to_string(pos.column) +
                         ": unsupported by the Erlang backend: " + what),
      pos_(pos) {}

namespace {

const std::set<std::string>& erlang_reserved() {
  static const std::set<std::string> words = {
      "after", "and",  "andalso", "band", "begin", "bnot",  "bor",     "bsl", "bsr",
      "bxor",  "case", "catch",   "cond", "div",   "end",   "fun",     "if",  "let",
      "not",   "of",   "or",      "orelse", "receive", "rem", "try",   "when", "xor", "maybe",
      "else"};
  return words;
}

// Renders a Rebeca identifier as an Erlang atom, quoting when needed.
std::string atom(const std::string& name) {
  bool plain = !name.empty() && std::islower(static_cast<unsigned char>(name[0])) &&
               !erlang_reserved().count(name);
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') plain = false;
  }
  return plain ? name : "'" + name + "'";
}

std::string lower_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

std::string upper_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string module_name(const std::string& cls) {
  std::string m = lower_first(cls);
  if (m == "main" || m == "rebeca_rt") m += "_rebec";
  return m;
}

// Variable names the emitted code uses for its own bookkeeping.
bool reserved_variable(const std::string& v) {
  static const std::set<std::string> fixed = {"MsgSender", "SendTime", "Deadline", "KnownRebecs",
                                              "Sender",    "StateVars", "Locals", "Env"};
  if (fixed.count(v)) return true;
  for (const char* prefix : {"StateVars", "Locals", "Cond", "Receiver", "Msg", "Deadline"}) {
    std::string p = prefix;
    if (v.size() > p.size() && v.compare(0, p.size(), p) == 0 &&
        std::isdigit(static_cast<unsigned char>(v[p.size()]))) {
      return true;
    }
  }
  return false;
}

std::string variable(const std::string& name) {
  std::string v = upper_first(name);
  if (reserved_variable(v)) v += "_";
  return v;
}

std::string default_literal(const TypeRef& t) {
  if (t.is_rebec()) return "undefined";
  return *t.base == BaseType::Boolean ? "false" : "0";
}

bool uses_sender(const std::vector<Stmt>& body);

bool expr_uses_sender(const Expr& e) {
  if (e.kind == ExprKind::Sender) return true;
  for (const auto& o : e.operands) {
    if (expr_uses_sender(o)) return true;
  }
  return false;
}

bool uses_sender(const std::vector<Stmt>& body) {
  for (const auto& s : body) {
    for (const auto& a : s.args) {
      if (expr_uses_sender(a)) return true;
    }
    for (const auto* e : {&s.expr, &s.after, &s.deadline}) {
      if (*e && expr_uses_sender(**e)) return true;
    }
    if (uses_sender(s.then_block) || uses_sender(s.else_block)) return true;
  }
  return false;
}

bool has_after_send(const std::vector<Stmt>& body) {
  for (const auto& s : body) {
    if (s.kind == StmtKind::Send && s.after) return true;
    if (has_after_send(s.then_block) || has_after_send(s.else_block)) return true;
  }
  return false;
}

void reject_new(const std::vector<Stmt>& body) {
  for (const auto& s : body) {
    if (s.kind == StmtKind::New) {
      throw UnsupportedFeature(s.pos, "rebec creation ('new " + s.name + "')");
    }
    reject_new(s.then_block);
    reject_new(s.else_block);
  }
}

std::string pad(int depth) { return std::string(static_cast<std::size_t>(depth) * 2, ' '); }

class MethodEmitter {
 public:
  MethodEmitter(const CheckedModel& model, std::uint32_t cls, std::uint32_t method)
      : model_(model), cls_(cls), def_(model.method(cls, method)) {
    const auto& name = model.cls(cls).name;
    module_ = module_name(name);
    locals_record_ = module_ + "_" + def_.name + "_locals";
    std::set<std::string> used;
    for (std::size_t i = 0; i < def_.frame_types.size(); ++i) {
      std::string field = i < def_.params.size() ? def_.params[i].name : local_name(def_.body, i);
      if (!used.insert(field).second) field += "_" + std::to_string(i);
      used.insert(field);
      fields_.push_back(field);
    }
  }

  bool has_locals() const { return !fields_.empty(); }
  const std::string& locals_record() const { return locals_record_; }

  std::string locals_record_definition() const {
    std::string out = "-record(" + locals_record_ + ", {";
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      if (i) out += ", ";
      out += atom(fields_[i]) + " = " + default_literal(def_.frame_types[i]);
    }
    return out + "}).\n";
  }

  std::string param_pattern() const {
    if (def_.params.empty()) return atom(def_.name);
    std::string out = "{" + atom(def_.name);
    for (const auto& p : def_.params) out += ", " + variable(p.name);
    return out + "}";
  }

  // Body expressions, each already indented at `depth`; the caller appends
  // the tail call.
  std::vector<std::string> body(int depth) {
    std::vector<std::string> out;
    if (has_after_send(def_.body)) out.push_back(pad(depth) + "Sender = self()");
    if (has_locals()) {
      std::string init = pad(depth) + "Locals0 = #" + locals_record_ + "{";
      for (std::size_t i = 0; i < def_.params.size(); ++i) {
        if (i) init += ", ";
        init += atom(fields_[i]) + " = " + variable(def_.params[i].name);
      }
      out.push_back(init + "}");
    }
    block(def_.body, depth, out);
    return out;
  }

  int state_version() const { return sv_; }

 private:
  static std::string local_name(const std::vector<Stmt>& body, std::size_t slot) {
    for (const auto& s : body) {
      if (s.kind == StmtKind::LocalDecl && s.target_slot.index == slot) return s.target;
      auto a = local_name(s.then_block, slot);
      if (!a.empty()) return a;
      auto b = local_name(s.else_block, slot);
      if (!b.empty()) return b;
    }
    return {};
  }

  std::string sv() const { return "StateVars" + std::to_string(sv_); }
  std::string lv() const { return "Locals" + std::to_string(lv_); }
  std::string statevars_record() const { return module_ + "_statevars"; }
  std::string known_record() const { return module_ + "_knownrebecs"; }

  std::string read(const VarSlot& slot, const std::string& name) const {
    const auto& cls = model_.cls(cls_);
    switch (slot.scope) {
      case VarScope::Local: return lv() + "#" + locals_record_ + "." + atom(fields_[slot.index]);
      case VarScope::StateVar:
        return sv() + "#" + statevars_record() + "." + atom(cls.state_vars[slot.index].name);
      case VarScope::KnownRebec:
        return "KnownRebecs#" + known_record() + "." + atom(cls.known_rebecs[slot.index].name);
      case VarScope::EnvVar: return "rebeca_rt:env(" + atom(name) + ")";
      case VarScope::Unresolved: break;
    }
    return "undefined";
  }

  static const char* op(BinaryOp b) {
    switch (b) {
      case BinaryOp::Or: return "orelse";
      case BinaryOp::And: return "andalso";
      case BinaryOp::Eq: return "=:=";
      case BinaryOp::Ne: return "=/=";
      case BinaryOp::Lt: return "<";
      case BinaryOp::Le: return "=<";
      case BinaryOp::Gt: return ">";
      case BinaryOp::Ge: return ">=";
      case BinaryOp::Add: return "+";
      case BinaryOp::Sub: return "-";
      case BinaryOp::Mul: return "*";
      case BinaryOp::Div: return "div";
      case BinaryOp::Mod: return "rem";
    }
    return "?";
  }

  std::string expr(const Expr& e) const {
    switch (e.kind) {
      case ExprKind::IntLit: return std::to_string(e.int_value);
      case ExprKind::BoolLit: return e.int_value ? "true" : "false";
      case ExprKind::Now: return "now()";
      case ExprKind::Sender: return "MsgSender";
      case ExprKind::Self: return "self()";
      case ExprKind::Var: return read(e.slot, e.name);
      case ExprKind::Unary:
        return e.uop == UnaryOp::Not ? "(not " + expr(e.operands[0]) + ")"
                                     : "(-" + expr(e.operands[0]) + ")";
      case ExprKind::Binary:
        return "(" + expr(e.operands[0]) + " " + op(e.bop) + " " + expr(e.operands[1]) + ")";
      case ExprKind::NondetChoice: {
        std::string out = "lists:nth(rand:uniform(" + std::to_string(e.operands.size()) + "), [";
        for (std::size_t i = 0; i < e.operands.size(); ++i) {
          if (i) out += ", ";
          out += expr(e.operands[i]);
        }
        return out + "])";
      }
    }
    return "undefined";
  }

  // Expression in a position where a bare literal reads better.
  std::string operand(const Expr& e) const {
    std::string s = expr(e);
    if (s.size() > 2 && s.front() == '(' && s.back() == ')' && e.kind == ExprKind::Binary) {
      return s.substr(1, s.size() - 2);
    }
    return s;
  }

  std::string target(const Stmt& s) const {
    if (s.target_is_self) return "self()";
    return read(s.target_slot, s.target);
  }

  std::string payload(const Stmt& s) const {
    const auto& m = model_.method(s.class_index, s.method_index);
    if (s.args.empty()) return atom(m.name);
    std::string out = "{" + atom(m.name);
    for (const auto& a : s.args) out += ", " + operand(a);
    return out + "}";
  }

  void block(const std::vector<Stmt>& stmts, int depth, std::vector<std::string>& out) {
    for (const auto& s : stmts) stmt(s, depth, out);
  }

  void stmt(const Stmt& s, int depth, std::vector<std::string>& out) {
    std::string ind = pad(depth);
    switch (s.kind) {
      case StmtKind::NowNoop: return;
      case StmtKind::New: throw UnsupportedFeature(s.pos, "rebec creation ('new " + s.name + "')");
      case StmtKind::LocalDecl:
      case StmtKind::Assign: {
        std::string value = s.expr ? operand(*s.expr) : default_literal(s.type);
        if (s.target_slot.scope == VarScope::StateVar) {
          std::string prev = sv();
          sv_ = ++counter_;
          out.push_back(ind + sv() + " = " + prev + "#" + statevars_record() + "{" +
                        atom(model_.cls(cls_).state_vars[s.target_slot.index].name) + " = " +
                        value + "}");
        } else {
          std::string prev = lv();
          lv_ = ++counter_;
          out.push_back(ind + lv() + " = " + prev + "#" + locals_record_ + "{" +
                        atom(fields_[s.target_slot.index]) + " = " + value + "}");
        }
        return;
      }
      case StmtKind::Delay: out.push_back(ind + "receive after " + operand(*s.expr) + " -> ok end"); return;
      case StmtKind::Send: {
        std::string deadline = "inf";
        if (s.deadline) {
          deadline = "Deadline" + std::to_string(++counter_);
          out.push_back(ind + deadline + " = now() + " + expr(*s.deadline));
        }
        if (!s.after) {
          out.push_back(ind + target(s) + " ! {{self(), now(), " + deadline + "}, " + payload(s) + "}");
          return;
        }
        auto n = std::to_string(++counter_);
        std::string receiver = "Receiver" + n;
        out.push_back(ind + receiver + " = " + target(s));
        std::string msg = payload(s);
        if (!s.args.empty()) {
          out.push_back(ind + "Msg" + n + " = " + msg);
          msg = "Msg" + n;
        }
        std::string text = ind + "spawn(fun() ->\n";
        text += ind + "  receive after " + operand(*s.after) + " ->\n";
        text += ind + "    " + receiver + " ! {{Sender, now(), " + deadline + "}, " + msg + "}\n";
        text += ind + "  end\n";
        text += ind + "end)";
        out.push_back(text);
        return;
      }
      case StmtKind::If: {
        auto cond = "Cond" + std::to_string(++counter_);
        out.push_back(ind + cond + " = " + operand(*s.expr));
        int sv0 = sv_, lv0 = lv_;
        std::vector<std::string> then_out, else_out;
        block(s.then_block, depth + 3, then_out);
        then_out.push_back(pad(depth + 3) + versions());
        sv_ = sv0;
        lv_ = lv0;
        if (s.has_else) block(s.else_block, depth + 3, else_out);
        else_out.push_back(pad(depth + 3) + versions());
        sv_ = ++counter_;
        if (has_locals()) lv_ = ++counter_;
        std::string text = ind + versions() + " =\n";
        text += ind + "  if\n";
        text += ind + "    " + cond + " ->\n" + join(then_out) + ";\n";
        text += ind + "    true ->\n" + join(else_out) + "\n";
        text += ind + "  end";
        out.push_back(text);
        return;
      }
    }
  }

  std::string versions() const {
    if (!has_locals()) return "{" + sv() + "}";
    return "{" + sv() + ", " + lv() + "}";
  }

  static std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) out += ",\n";
      out += parts[i];
    }
    return out;
  }

  const CheckedModel& model_;
  std::uint32_t cls_;
  const MethodDef& def_;
  std::string module_;
  std::string locals_record_;
  std::vector<std::string> fields_;
  int sv_ = 0;
  int lv_ = 0;
  int counter_ = 0;
};

std::string join_exprs(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    out += parts[i];
    out += i + 1 < parts.size() ? ",\n" : "";
  }
  return out;
}

std::string emit_class(const CheckedModel& model, std::uint32_t c) {
  const auto& cls = model.cls(c);
  const std::string mod = module_name(cls.name);
  const std::string known = mod + "_knownrebecs";
  const std::string vars = mod + "_statevars";
  std::ostringstream os;
  os << "-module(" << mod << ").\n";
  os << "-export([" << mod << "/0]).\n";
  os << "-compile({no_auto_import, [now/0]}).\n\n";

  os << "-record(" << known << ", {";
  for (std::size_t i = 0; i < cls.known_rebecs.size(); ++i) {
    os << (i ? ", " : "") << atom(cls.known_rebecs[i].name);
  }
  os << "}).\n";
  os << "-record(" << vars << ", {";
  for (std::size_t i = 0; i < cls.state_vars.size(); ++i) {
    os << (i ? ", " : "") << atom(cls.state_vars[i].name) << " = "
       << default_literal(cls.state_vars[i].type);
  }
  os << "}).\n";

  std::vector<MethodEmitter> emitters;
  for (std::uint32_t m = 0; m < cls.methods.size(); ++m) emitters.emplace_back(model, c, m);
  for (const auto& e : emitters) {
    if (e.has_locals()) os << e.locals_record_definition();
  }
  os << "\nnow() -> rebeca_rt:now().\n\n";

  // Stage 1: wait for the known rebecs.
  os << mod << "() ->\n";
  os << "  receive\n";
  os << "    {";
  for (std::size_t i = 0; i < cls.known_rebecs.size(); ++i) {
    os << (i ? ", " : "") << variable(cls.known_rebecs[i].name);
  }
  os << "} ->\n";
  os << "      " << mod << "(#" << known << "{";
  for (std::size_t i = 0; i < cls.known_rebecs.size(); ++i) {
    os << (i ? ", " : "") << atom(cls.known_rebecs[i].name) << " = "
       << variable(cls.known_rebecs[i].name);
  }
  os << "})\n";
  os << "  end.\n\n";

  // Stage 2: serve `initial`, with the constructor values from main.
  auto init = *model.initial_index(c);
  auto& ie = emitters[init];
  const auto& idef = cls.methods[init];
  std::string sender_var = uses_sender(idef.body) ? "MsgSender" : "_MsgSender";
  os << mod << "(KnownRebecs) ->\n";
  os << "  receive\n";
  os << "    {{" << sender_var << ", _SendTime, _Deadline}, {initial, Ctor}} ->\n";
  {
    std::vector<std::string> body;
    body.push_back("      StateVars0 = rebeca_rt:construct(#" + vars + "{}, Ctor)");
    auto rest = ie.body(3);
    body.insert(body.end(), rest.begin(), rest.end());
    body.push_back("      " + mod + "(KnownRebecs, StateVars" + std::to_string(ie.state_version()) + ")");
    os << join_exprs(body) << "\n";
  }
  os << "  end.\n\n";

  // Stage 3: the serve loop, one receive-match per message server.
  os << mod << "(KnownRebecs, StateVars0) ->\n";
  os << "  receive\n";
  bool first = true;
  for (std::uint32_t m = 0; m < cls.methods.size(); ++m) {
    if (m == init) continue;
    auto& e = emitters[m];
    const auto& def = cls.methods[m];
    if (!first) os << ";\n";
    first = false;
    std::string sv = uses_sender(def.body) ? "MsgSender" : "_MsgSender";
    os << "    {{" << sv << ", _SendTime, Deadline}, " << e.param_pattern() << "} ->\n";
    os << "      case rebeca_rt:expired(Deadline) of\n";
    os << "        true ->\n";
    os << "          " << mod << "(KnownRebecs, StateVars0);\n";
    os << "        false ->\n";
    auto body = e.body(5);
    body.push_back("          " + mod + "(KnownRebecs, StateVars" + std::to_string(e.state_version()) + ")");
    os << join_exprs(body) << "\n";
    os << "      end";
  }
  if (first) {
    // Only `initial`: the process idles.
    os << "    stop ->\n      ok";
  }
  os << "\n  end.\n";
  return os.str();
}

std::string runtime_unit() {
  return R"(-module(rebeca_rt).
-export([init/1, now/0, env/1, expired/1, construct/2]).
-compile({no_auto_import, [now/0]}).

%% One logical time unit is one millisecond of wall-clock time.

init(Env) ->
  persistent_term:put({rebeca_rt, t0}, erlang:monotonic_time(millisecond)),
  maps:foreach(fun(K, V) -> persistent_term:put({rebeca_rt, env, K}, V) end, Env).

now() ->
  erlang:monotonic_time(millisecond) - persistent_term:get({rebeca_rt, t0}).

env(Name) ->
  persistent_term:get({rebeca_rt, env, Name}).

expired(inf) -> false;
expired(Deadline) -> now() > Deadline.

%% Fills the leading state variables of a fresh record with the values
%% given in main.
construct(Record, Values) ->
  Fields = tuple_to_list(Values),
  lists:foldl(fun({I, V}, R) -> setelement(I + 1, R, V) end, Record,
              lists:zip(lists:seq(1, length(Fields)), Fields)).
)";
}

std::string bootstrap_unit(const CheckedModel& model) {
  const auto& main = model.model().main;
  std::vector<std::string> vars;
  std::set<std::string> used;
  for (const auto& inst : main) {
    std::string v = variable(inst.name);
    while (!used.insert(v).second) v += "_";
    vars.push_back(v);
  }
  auto var_of = [&](const std::string& name) { return vars[*model.instance_index(name)]; };

  std::ostringstream os;
  os << "-module(main).\n";
  os << "-export([start/1]).\n\n";
  os << "%% Env maps every env variable of the model to its value, e.g.\n";
  os << "%% main:start(#{";
  const auto& env = model.model().env_decls;
  for (std::size_t i = 0; i < env.size(); ++i) {
    os << (i ? ", " : "") << atom(env[i].name) << " => "
       << (env[i].type.base == BaseType::Boolean ? "false" : "1");
  }
  os << "}).\n";
  os << "start(Env) ->\n";
  std::vector<std::string> body;
  body.push_back("  rebeca_rt:init(Env)");
  for (std::size_t i = 0; i < main.size(); ++i) {
    auto mod = module_name(main[i].class_name);
    body.push_back("  " + vars[i] + " = spawn(" + mod + ", " + mod + ", [])");
  }
  for (std::size_t i = 0; i < main.size(); ++i) {
    std::string t = "  " + vars[i] + " ! {";
    for (std::size_t k = 0; k < main[i].known_args.size(); ++k) {
      t += (k ? ", " : "") + var_of(main[i].known_args[k]);
    }
    body.push_back(t + "}");
  }
  for (std::size_t i = 0; i < main.size(); ++i) {
    std::string t = "  " + vars[i] + " ! {{external, 0, inf}, {initial, {";
    for (std::size_t a = 0; a < main[i].ctor_args.size(); ++a) {
      const auto& e = main[i].ctor_args[a];
      if (a) t += ", ";
      if (e.kind == ExprKind::Var) {
        t += "rebeca_rt:env(" + atom(e.name) + ")";
      } else if (e.kind == ExprKind::IntLit) {
        t += std::to_string(e.int_value);
      } else if (e.kind == ExprKind::BoolLit) {
        t += e.int_value ? "true" : "false";
      } else {
        throw UnsupportedFeature(e.pos, "computed constructor arguments");
      }
    }
    body.push_back(t + "}}}");
  }
  body.push_back("  ok");
  os << join_exprs(body) << ".\n";
  return os.str();
}

}  // namespace

EmittedProgram emit_erlang(const CheckedModel& model) {
  for (std::uint32_t c = 0; c < model.class_count(); ++c) {
    for (const auto& m : model.cls(c).methods) reject_new(m.body);
  }
  EmittedProgram p;
  for (std::uint32_t c = 0; c < model.class_count(); ++c) {
    auto mod = module_name(model.cls(c).name);
    p.files.push_back({mod + ".erl", emit_class(model, c)});
  }
  p.files.push_back({"rebeca_rt.erl", runtime_unit()});
  p.files.push_back({"main.erl", bootstrap_unit(model)});
  return p;
}

void write_program(const EmittedProgram& program, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& f : program.files) {
    std::ofstream out(dir / f.name, std::ios::binary | std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot write " + (dir / f.name).string());
    out.exceptions(std::ios::badbit | std::ios::failbit);
    out << f.text;
  }
}

bool balanced_delimiters(const std::string& text) {
  std::vector<char> stack;
  std::size_t i = 0;
  auto close_for = [](char open) { return open == '(' ? ')' : open == '[' ? ']' : open == '{' ? '}' : 'e'; };
  while (i < text.size()) {
    char c = text[i];
    if (c == '%') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (c == '"' || c == '\'') {
      char q = c;
      ++i;
      while (i < text.size() && text[i] != q) {
        if (text[i] == '\\') ++i;
        ++i;
      }
      if (i >= text.size()) return false;
      ++i;
      continue;
    }
    if (c == '$') {  // character literal
      i += 2;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      auto start = i;
      while (i < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_' || text[i] == '@')) {
        ++i;
      }
      std::string word = text.substr(start, i - start);
      bool prev_colon = start > 0 && text[start - 1] == ':';
      bool prev_hash = start > 0 && (text[start - 1] == '#' || text[start - 1] == '.');
      if (prev_colon || prev_hash) continue;
      if (word == "fun") {
        auto j = i;
        while (j < text.size() && text[j] == ' ') ++j;
        if (j < text.size() && text[j] == '(') stack.push_back('k');
      } else if (word == "receive" || word == "case" || word == "if" || word == "begin" ||
                 word == "try") {
        stack.push_back('k');
      } else if (word == "end") {
        if (stack.empty() || stack.back() != 'k') return false;
        stack.pop_back();
      }
      continue;
    }
    if (c == '(' || c == '[' || c == '{') {
      stack.push_back(c);
    } else if (c == ')' || c == ']' || c == '}') {
      if (stack.empty() || stack.back() == 'k' || close_for(stack.back()) != c) return false;
      stack.pop_back();
    }
    ++i;
  }
  return stack.empty();
}

}  // namespace trebeca
