#include "trebeca/ast.hpp"

#include "trebeca/diagnostics.hpp"

namespace trebeca {

const char* base_type_name(BaseType t) {
  switch (t) {
    case BaseType::Int: return "int";
    case BaseType::Boolean: return "boolean";
    case BaseType::Time: return "time";
  }
  return "?";
}

const char* binary_op_spelling(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return "||";
    case BinaryOp::And: return "&&";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
  }
  return "?";
}

// C precedence levels; higher binds tighter. Unary operators sit above all.
int binary_op_precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return 1;
    case BinaryOp::And: return 2;
    case BinaryOp::Eq:
    case BinaryOp::Ne: return 3;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 4;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 5;
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: return 6;
  }
  return 0;
}

Expr Expr::int_lit(std::int64_t v, SourcePos p) {
  Expr e;
  e.kind = ExprKind::IntLit;
  e.int_value = v;
  e.pos = p;
  return e;
}

Expr Expr::bool_lit(bool v, SourcePos p) {
  Expr e;
  e.kind = ExprKind::BoolLit;
  e.int_value = v ? 1 : 0;
  e.pos = p;
  return e;
}

Expr Expr::var(std::string n, SourcePos p) {
  Expr e;
  e.kind = ExprKind::Var;
  e.name = std::move(n);
  e.pos = p;
  return e;
}

Expr Expr::now(SourcePos p) {
  Expr e;
  e.kind = ExprKind::Now;
  e.pos = p;
  return e;
}

Expr Expr::sender(SourcePos p) {
  Expr e;
  e.kind = ExprKind::Sender;
  e.pos = p;
  return e;
}

Expr Expr::self(SourcePos p) {
  Expr e;
  e.kind = ExprKind::Self;
  e.pos = p;
  return e;
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs, SourcePos p) {
  Expr e;
  e.kind = ExprKind::Binary;
  e.bop = op;
  e.operands.push_back(std::move(lhs));
  e.operands.push_back(std::move(rhs));
  e.pos = p;
  return e;
}

Expr Expr::unary(UnaryOp op, Expr operand, SourcePos p) {
  Expr e;
  e.kind = ExprKind::Unary;
  e.uop = op;
  e.operands.push_back(std::move(operand));
  e.pos = p;
  return e;
}

Expr Expr::choice(std::vector<Expr> alternatives, SourcePos p) {
  Expr e;
  e.kind = ExprKind::NondetChoice;
  e.operands = std::move(alternatives);
  e.pos = p;
  return e;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit: return a.int_value == b.int_value;
    case ExprKind::Var: return a.name == b.name;
    case ExprKind::Now:
    case ExprKind::Sender:
    case ExprKind::Self: return true;
    case ExprKind::Binary: return a.bop == b.bop && a.operands == b.operands;
    case ExprKind::Unary: return a.uop == b.uop && a.operands == b.operands;
    case ExprKind::NondetChoice: return a.operands == b.operands;
  }
  return false;
}

bool operator==(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case StmtKind::LocalDecl:
      return a.type == b.type && a.target == b.target && a.expr == b.expr;
    case StmtKind::Assign: return a.target == b.target && a.expr == b.expr;
    case StmtKind::Send:
      return a.target == b.target && a.name == b.name && a.args == b.args && a.after == b.after &&
             a.deadline == b.deadline;
    case StmtKind::New: return a.target == b.target && a.name == b.name && a.args == b.args;
    case StmtKind::If:
      return a.expr == b.expr && a.then_block == b.then_block && a.has_else == b.has_else &&
             a.else_block == b.else_block;
    case StmtKind::Delay: return a.expr == b.expr;
    case StmtKind::NowNoop: return true;
  }
  return false;
}

bool has_errors(const Diagnostics& diags) {
  for (const auto& d : diags) {
    if (d.severity == Severity::Error) return true;
  }
  return false;
}

std::string format_diagnostic(const std::string& file, const ParseError& d) {
  return file + ":" + std::to_string(d.pos.line) + ":" + std::to_string(d.pos.column) + ": " +
         (d.severity == Severity::Error ? "error" : "warning") + ": " + d.message;
}

}  // namespace trebeca
