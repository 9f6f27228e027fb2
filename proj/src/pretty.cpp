#include "trebeca/pretty.hpp"

#include <sstream>

namespace trebeca {
namespace {

void print_expr(std::ostream& os, const Expr& e);

void print_list(std::ostream& os, const std::vector<Expr>& xs) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) os << ", ";
    print_expr(os, xs[i]);
  }
}

void print_operand(std::ostream& os, const Expr& e, int min_prec) {
  bool paren = e.kind == ExprKind::Binary && binary_op_precedence(e.bop) < min_prec;
  if (paren) os << '(';
  print_expr(os, e);
  if (paren) os << ')';
}

void print_expr(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case ExprKind::IntLit: os << e.int_value; break;
    case ExprKind::BoolLit: os << (e.int_value ? "true" : "false"); break;
    case ExprKind::Var: os << e.name; break;
    case ExprKind::Now: os << "now()"; break;
    case ExprKind::Sender: os << "sender"; break;
    case ExprKind::Self: os << "self"; break;
    case ExprKind::Unary:
      os << (e.uop == UnaryOp::Neg ? "-" : "!");
      print_operand(os, e.operands[0], 100);
      break;
    case ExprKind::Binary: {
      int p = binary_op_precedence(e.bop);
      print_operand(os, e.operands[0], p);
      os << ' ' << binary_op_spelling(e.bop) << ' ';
      print_operand(os, e.operands[1], p + 1);
      break;
    }
    case ExprKind::NondetChoice:
      os << "?(";
      print_list(os, e.operands);
      os << ')';
      break;
  }
}

void indent(std::ostream& os, int depth) {
  for (int i = 0; i < depth; ++i) os << "    ";
}

void print_block(std::ostream& os, const std::vector<Stmt>& block, int depth);

void print_stmt(std::ostream& os, const Stmt& s, int depth) {
  indent(os, depth);
  switch (s.kind) {
    case StmtKind::LocalDecl:
      os << s.type.spelling() << ' ' << s.target;
      if (s.expr) {
        os << " = ";
        print_expr(os, *s.expr);
      }
      os << ";\n";
      break;
    case StmtKind::Assign:
      os << s.target << " = ";
      print_expr(os, *s.expr);
      os << ";\n";
      break;
    case StmtKind::New:
      os << s.target << " = new " << s.name << '(';
      print_list(os, s.args);
      os << ");\n";
      break;
    case StmtKind::Send:
      os << s.target << '.' << s.name << '(';
      print_list(os, s.args);
      os << ')';
      if (s.after) {
        os << " after(";
        print_expr(os, *s.after);
        os << ')';
      }
      if (s.deadline) {
        os << " deadline(";
        print_expr(os, *s.deadline);
        os << ')';
      }
      os << ";\n";
      break;
    case StmtKind::If:
      os << "if (";
      print_expr(os, *s.expr);
      os << ") {\n";
      print_block(os, s.then_block, depth + 1);
      indent(os, depth);
      if (s.has_else) {
        os << "} else {\n";
        print_block(os, s.else_block, depth + 1);
        indent(os, depth);
      }
      os << "}\n";
      break;
    case StmtKind::Delay:
      os << "delay(";
      print_expr(os, *s.expr);
      os << ");\n";
      break;
    case StmtKind::NowNoop: os << "now();\n"; break;
  }
}

void print_block(std::ostream& os, const std::vector<Stmt>& block, int depth) {
  for (const auto& s : block) print_stmt(os, s, depth);
}

void print_decls(std::ostream& os, const char* keyword, const std::vector<VarDecl>& decls) {
  if (decls.empty()) return;
  os << "    " << keyword << " {\n";
  for (const auto& d : decls) os << "        " << d.type.spelling() << ' ' << d.name << ";\n";
  os << "    }\n";
}

}  // namespace

std::string pretty_print(const Expr& expr) {
  std::ostringstream os;
  print_expr(os, expr);
  return os.str();
}

std::string pretty_print(const Model& model) {
  std::ostringstream os;
  for (const auto& d : model.env_decls) os << "env " << d.type.spelling() << ' ' << d.name << ";\n";
  if (!model.env_decls.empty()) os << '\n';
  for (const auto& c : model.classes) {
    os << "reactiveclass " << c.name;
    if (c.queue_bound) os << '(' << *c.queue_bound << ')';
    os << " {\n";
    print_decls(os, "knownrebecs", c.known_rebecs);
    print_decls(os, "statevars", c.state_vars);
    for (const auto& m : c.methods) {
      os << "\n    msgsrv " << m.name << '(';
      for (std::size_t i = 0; i < m.params.size(); ++i) {
        if (i) os << ", ";
        os << m.params[i].type.spelling() << ' ' << m.params[i].name;
      }
      os << ") {\n";
      print_block(os, m.body, 2);
      os << "    }\n";
    }
    os << "}\n\n";
  }
  os << "main {\n";
  for (const auto& inst : model.main) {
    os << "    " << inst.class_name << ' ' << inst.name << '(';
    for (std::size_t i = 0; i < inst.known_args.size(); ++i) {
      if (i) os << ", ";
      os << inst.known_args[i];
    }
    os << "):(";
    print_list(os, inst.ctor_args);
    os << ");\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace trebeca
