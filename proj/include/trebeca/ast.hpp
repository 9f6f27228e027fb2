#pragma once

// Syntax tree of a Timed Rebeca model. Nodes compare structurally: source
// positions and the resolution annotations filled in by validate_model are
// ignored by operator==.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace trebeca {

struct SourcePos {
  int line = 0;
  int column = 0;
};

enum class BaseType : std::uint8_t { Int, Boolean, Time };

const char* base_type_name(BaseType t);

/// A declared type: one of the base types or a reactive class name (a rebec
/// reference).
struct TypeRef {
  std::optional<BaseType> base;
  std::string class_name;

  static TypeRef of(BaseType b) { return TypeRef{b, {}}; }
  static TypeRef rebec(std::string cls) { return TypeRef{std::nullopt, std::move(cls)}; }

  bool is_rebec() const { return !base.has_value(); }
  std::string spelling() const { return base ? base_type_name(*base) : class_name; }

  friend bool operator==(const TypeRef&, const TypeRef&) = default;
};

struct VarDecl {
  TypeRef type;
  std::string name;
  SourcePos pos;

  friend bool operator==(const VarDecl& a, const VarDecl& b) {
    return a.type == b.type && a.name == b.name;
  }
};

enum class ExprKind : std::uint8_t {
  IntLit,
  BoolLit,
  Var,
  Now,
  Sender,
  Self,
  Binary,
  Unary,
  NondetChoice,
};

enum class BinaryOp : std::uint8_t { Or, And, Eq, Ne, Lt, Le, Gt, Ge, Add, Sub, Mul, Div, Mod };
enum class UnaryOp : std::uint8_t { Neg, Not };

const char* binary_op_spelling(BinaryOp op);
int binary_op_precedence(BinaryOp op);

/// Where a variable name resolved to.
enum class VarScope : std::uint8_t { Unresolved, Local, StateVar, KnownRebec, EnvVar };

struct VarSlot {
  VarScope scope = VarScope::Unresolved;
  std::uint32_t index = 0;
};

struct Expr {
  ExprKind kind = ExprKind::IntLit;
  SourcePos pos;
  std::int64_t int_value = 0;  // IntLit value, BoolLit 0/1
  std::string name;            // Var
  BinaryOp bop = BinaryOp::Add;
  UnaryOp uop = UnaryOp::Neg;
  std::vector<Expr> operands;  // Binary: 2, Unary: 1, NondetChoice: >= 2

  // Filled in by validate_model.
  VarSlot slot;
  std::uint32_t site = 0;  // lexical index of a NondetChoice within its method

  static Expr int_lit(std::int64_t v, SourcePos p = {});
  static Expr bool_lit(bool v, SourcePos p = {});
  static Expr var(std::string n, SourcePos p = {});
  static Expr now(SourcePos p = {});
  static Expr sender(SourcePos p = {});
  static Expr self(SourcePos p = {});
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs, SourcePos p = {});
  static Expr unary(UnaryOp op, Expr operand, SourcePos p = {});
  static Expr choice(std::vector<Expr> alternatives, SourcePos p = {});

  friend bool operator==(const Expr& a, const Expr& b);
};

enum class StmtKind : std::uint8_t { LocalDecl, Assign, Send, New, If, Delay, NowNoop };

struct Stmt {
  StmtKind kind = StmtKind::NowNoop;
  SourcePos pos;
  std::string target;  // Assign/New lhs, LocalDecl name, Send receiver
  std::string name;    // Send method, New class
  TypeRef type;        // LocalDecl
  std::vector<Expr> args;
  std::optional<Expr> expr;  // Assign rhs, LocalDecl init, If condition, Delay amount
  std::optional<Expr> after;
  std::optional<Expr> deadline;
  std::vector<Stmt> then_block;
  std::vector<Stmt> else_block;
  bool has_else = false;

  // Filled in by validate_model.
  VarSlot target_slot;           // Assign/New/LocalDecl lhs; Send receiver (unless self)
  bool target_is_self = false;   // Send to self
  std::uint32_t class_index = 0; // New: created class; Send: receiver's static class
  std::uint32_t method_index = 0;// Send: method within the receiver's class

  friend bool operator==(const Stmt& a, const Stmt& b);
};

struct MethodDef {
  std::string name;
  std::vector<VarDecl> params;
  std::vector<Stmt> body;
  SourcePos pos;

  // Filled in by validate_model: params first, then local declarations in
  // lexical order.
  std::vector<TypeRef> frame_types;

  friend bool operator==(const MethodDef& a, const MethodDef& b) {
    return a.name == b.name && a.params == b.params && a.body == b.body;
  }
};

struct ReactiveClassDef {
  std::string name;
  std::optional<std::int64_t> queue_bound;  // untimed-Rebeca legacy, ignored
  std::vector<VarDecl> known_rebecs;
  std::vector<VarDecl> state_vars;
  std::vector<MethodDef> methods;
  SourcePos pos;

  friend bool operator==(const ReactiveClassDef& a, const ReactiveClassDef& b) {
    return a.name == b.name && a.queue_bound == b.queue_bound &&
           a.known_rebecs == b.known_rebecs && a.state_vars == b.state_vars &&
           a.methods == b.methods;
  }
};

/// `C r(k1, k2):(c1, c2);` in the main block.
struct InstanceDecl {
  std::string class_name;
  std::string name;
  std::vector<std::string> known_args;
  std::vector<Expr> ctor_args;
  SourcePos pos;

  friend bool operator==(const InstanceDecl& a, const InstanceDecl& b) {
    return a.class_name == b.class_name && a.name == b.name && a.known_args == b.known_args &&
           a.ctor_args == b.ctor_args;
  }
};

struct Model {
  std::vector<VarDecl> env_decls;
  std::vector<ReactiveClassDef> classes;
  std::vector<InstanceDecl> main;

  friend bool operator==(const Model& a, const Model& b) {
    return a.env_decls == b.env_decls && a.classes == b.classes && a.main == b.main;
  }
};

}  // namespace trebeca
