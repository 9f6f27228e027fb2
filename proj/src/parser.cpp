#include "trebeca/parser.hpp"

#include <cctype>
#include <charconv>
#include <limits>
#include <unordered_map>

namespace trebeca {
namespace {

enum class Tok {
  End,
  Ident,
  Int,
  // keywords
  KwReactiveclass,
  KwKnownrebecs,
  KwStatevars,
  KwMsgsrv,
  KwMain,
  KwEnv,
  KwNew,
  KwIf,
  KwElse,
  KwDelay,
  KwNow,
  KwAfter,
  KwDeadline,
  KwSelf,
  KwSender,
  KwInt,
  KwBoolean,
  KwTime,
  KwTrue,
  KwFalse,
  // punctuation
  LBrace,
  RBrace,
  LParen,
  RParen,
  Semi,
  Comma,
  Dot,
  Colon,
  Assign,
  EqEq,
  NotEq,
  Lt,
  Le,
  Gt,
  Ge,
  Plus,
  Minus,
  Star,
  Slash,
  Percent,
  Bang,
  AndAnd,
  OrOr,
  Question,
};

const std::unordered_map<std::string_view, Tok>& keywords() {
  static const std::unordered_map<std::string_view, Tok> kw = {
      {"reactiveclass", Tok::KwReactiveclass},
      {"knownrebecs", Tok::KwKnownrebecs},
      {"statevars", Tok::KwStatevars},
      {"msgsrv", Tok::KwMsgsrv},
      {"main", Tok::KwMain},
      {"env", Tok::KwEnv},
      {"new", Tok::KwNew},
      {"if", Tok::KwIf},
      {"else", Tok::KwElse},
      {"delay", Tok::KwDelay},
      {"now", Tok::KwNow},
      {"after", Tok::KwAfter},
      {"deadline", Tok::KwDeadline},
      {"self", Tok::KwSelf},
      {"sender", Tok::KwSender},
      {"int", Tok::KwInt},
      {"boolean", Tok::KwBoolean},
      {"time", Tok::KwTime},
      {"true", Tok::KwTrue},
      {"false", Tok::KwFalse},
  };
  return kw;
}

struct Token {
  Tok kind = Tok::End;
  std::string_view text;
  SourcePos pos;
  std::int64_t value = 0;
};

struct SyntaxError {
  SourcePos pos;
  std::string message;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      Token t;
      t.pos = {line_, col_};
      if (i_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[i_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        auto start = i_;
        while (i_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_')) {
          advance();
        }
        t.text = src_.substr(start, i_ - start);
        auto it = keywords().find(t.text);
        t.kind = it == keywords().end() ? Tok::Ident : it->second;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        auto start = i_;
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) advance();
        t.text = src_.substr(start, i_ - start);
        t.kind = Tok::Int;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
        if (ec != std::errc()) {
          throw SyntaxError{t.pos, "integer literal out of range: " + std::string(t.text)};
        }
      } else {
        t.kind = punct(t.pos);
        t.text = src_.substr(i_ - width_, width_);
      }
      out.push_back(t);
    }
  }

 private:
  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip_space_and_comments() {
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && i_ + 1 < src_.size() && src_[i_ + 1] == '/') {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
      } else if (c == '/' && i_ + 1 < src_.size() && src_[i_ + 1] == '*') {
        SourcePos start{line_, col_};
        advance();
        advance();
        for (;;) {
          if (i_ >= src_.size()) throw SyntaxError{start, "unterminated block comment"};
          if (src_[i_] == '*' && i_ + 1 < src_.size() && src_[i_ + 1] == '/') {
            advance();
            advance();
            break;
          }
          advance();
        }
      } else {
        break;
      }
    }
  }

  Tok punct(SourcePos pos) {
    char c = src_[i_];
    char n = i_ + 1 < src_.size() ? src_[i_ + 1] : '\0';
    auto two = [&](Tok t) {
      advance();
      advance();
      width_ = 2;
      return t;
    };
    auto one = [&](Tok t) {
      advance();
      width_ = 1;
      return t;
    };
    switch (c) {
      case '{': return one(Tok::LBrace);
      case '}': return one(Tok::RBrace);
      case '(': return one(Tok::LParen);
      case ')': return one(Tok::RParen);
      case ';': return one(Tok::Semi);
      case ',': return one(Tok::Comma);
      case '.': return one(Tok::Dot);
      case ':': return one(Tok::Colon);
      case '?': return one(Tok::Question);
      case '+': return one(Tok::Plus);
      case '-': return one(Tok::Minus);
      case '*': return one(Tok::Star);
      case '/': return one(Tok::Slash);
      case '%': return one(Tok::Percent);
      case '=': return n == '=' ? two(Tok::EqEq) : one(Tok::Assign);
      case '!': return n == '=' ? two(Tok::NotEq) : one(Tok::Bang);
      case '<': return n == '=' ? two(Tok::Le) : one(Tok::Lt);
      case '>': return n == '=' ? two(Tok::Ge) : one(Tok::Gt);
      case '&':
        if (n == '&') return two(Tok::AndAnd);
        break;
      case '|':
        if (n == '|') return two(Tok::OrOr);
        break;
      default: break;
    }
    throw SyntaxError{pos, std::string("unexpected character '") + c + "'"};
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
  std::size_t width_ = 1;
};

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + std::string(t.text) + "'";
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Model parse() {
    Model m;
    while (peek().kind == Tok::KwEnv) parse_env(m);
    while (peek().kind == Tok::KwReactiveclass) m.classes.push_back(parse_class());
    if (peek().kind == Tok::KwEnv) {
      fail(peek(), "env declarations must precede reactive classes");
    }
    if (peek().kind != Tok::KwMain) {
      if (starts_statement(peek().kind)) {
        fail(peek(), "statement outside of a message server");
      }
      fail(peek(), "expected 'reactiveclass' or 'main', found " + describe(peek()));
    }
    next();
    expect(Tok::LBrace, "'{' after 'main'");
    while (peek().kind != Tok::RBrace) {
      if (peek().kind == Tok::End) fail(peek(), "unterminated main block");
      m.main.push_back(parse_instance());
    }
    next();
    if (peek().kind != Tok::End) {
      fail(peek(), "unexpected " + describe(peek()) + " after main block");
    }
    return m;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    auto i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  [[noreturn]] void fail(const Token& t, const std::string& msg) { throw SyntaxError{t.pos, msg}; }
  const Token& expect(Tok k, const std::string& what) {
    if (peek().kind != k) fail(peek(), "expected " + what + ", found " + describe(peek()));
    return next();
  }
  std::string ident(const std::string& what) {
    return std::string(expect(Tok::Ident, what).text);
  }

  static bool starts_statement(Tok k) {
    return k == Tok::KwDelay || k == Tok::KwIf || k == Tok::KwNow || k == Tok::KwSelf ||
           k == Tok::KwAfter || k == Tok::KwDeadline || k == Tok::Ident;
  }

  static std::optional<BaseType> base_type(Tok k) {
    switch (k) {
      case Tok::KwInt: return BaseType::Int;
      case Tok::KwBoolean: return BaseType::Boolean;
      case Tok::KwTime: return BaseType::Time;
      default: return std::nullopt;
    }
  }

  TypeRef parse_type() {
    const Token& t = peek();
    if (auto b = base_type(t.kind)) {
      next();
      return TypeRef::of(*b);
    }
    if (t.kind == Tok::Ident) {
      next();
      return TypeRef::rebec(std::string(t.text));
    }
    fail(t, "expected a type, found " + describe(t));
  }

  void parse_env(Model& m) {
    next();
    auto tpos = peek().pos;
    auto b = base_type(peek().kind);
    if (!b) fail(peek(), "env variables must have type int, boolean or time");
    next();
    do {
      SourcePos p = peek().pos;
      m.env_decls.push_back(VarDecl{TypeRef::of(*b), ident("env variable name"), p});
    } while (peek().kind == Tok::Comma && (next(), true));
    (void)tpos;
    expect(Tok::Semi, "';' after env declaration");
  }

  // `T a, b;` lines inside knownrebecs/statevars.
  void parse_var_block(std::vector<VarDecl>& out, bool rebecs_only) {
    expect(Tok::LBrace, "'{'");
    while (peek().kind != Tok::RBrace) {
      if (peek().kind == Tok::End) fail(peek(), "unterminated declaration block");
      const Token& tt = peek();
      TypeRef type = parse_type();
      if (rebecs_only && !type.is_rebec()) {
        fail(tt, "known rebecs must be declared with a reactive class type");
      }
      do {
        SourcePos p = peek().pos;
        out.push_back(VarDecl{type, ident("variable name"), p});
      } while (peek().kind == Tok::Comma && (next(), true));
      expect(Tok::Semi, "';' after declaration");
    }
    next();
  }

  ReactiveClassDef parse_class() {
    ReactiveClassDef c;
    c.pos = next().pos;
    c.name = ident("class name");
    if (peek().kind == Tok::LParen) {
      next();
      c.queue_bound = expect(Tok::Int, "queue length").value;
      expect(Tok::RParen, "')'");
    }
    expect(Tok::LBrace, "'{' to open the class body");
    bool seen_known = false;
    bool seen_vars = false;
    for (;;) {
      const Token& t = peek();
      if (t.kind == Tok::KwKnownrebecs) {
        if (seen_known) fail(t, "duplicate 'knownrebecs' block");
        if (!c.methods.empty()) fail(t, "'knownrebecs' must precede message servers");
        seen_known = true;
        next();
        parse_var_block(c.known_rebecs, true);
      } else if (t.kind == Tok::KwStatevars) {
        if (seen_vars) fail(t, "duplicate 'statevars' block");
        if (!c.methods.empty()) fail(t, "'statevars' must precede message servers");
        seen_vars = true;
        next();
        parse_var_block(c.state_vars, false);
      } else if (t.kind == Tok::KwMsgsrv) {
        c.methods.push_back(parse_method());
      } else if (t.kind == Tok::RBrace) {
        next();
        return c;
      } else if (starts_statement(t.kind)) {
        fail(t, "statement outside of a message server");
      } else {
        fail(t, "expected 'knownrebecs', 'statevars', 'msgsrv' or '}', found " + describe(t));
      }
    }
  }

  MethodDef parse_method() {
    MethodDef m;
    m.pos = next().pos;
    m.name = ident("message server name");
    expect(Tok::LParen, "'('");
    if (peek().kind != Tok::RParen) {
      do {
        SourcePos p = peek().pos;
        TypeRef t = parse_type();
        m.params.push_back(VarDecl{t, ident("parameter name"), p});
      } while (peek().kind == Tok::Comma && (next(), true));
    }
    expect(Tok::RParen, "')'");
    m.body = parse_block();
    return m;
  }

  std::vector<Stmt> parse_block() {
    expect(Tok::LBrace, "'{'");
    std::vector<Stmt> out;
    while (peek().kind != Tok::RBrace) {
      if (peek().kind == Tok::End) fail(peek(), "unterminated block");
      out.push_back(parse_stmt());
    }
    next();
    return out;
  }

  std::vector<Stmt> parse_mst() {
    if (peek().kind == Tok::LBrace) return parse_block();
    std::vector<Stmt> one;
    one.push_back(parse_stmt());
    return one;
  }

  std::vector<Expr> parse_args() {
    expect(Tok::LParen, "'('");
    std::vector<Expr> args;
    if (peek().kind != Tok::RParen) {
      do {
        args.push_back(parse_expr());
      } while (peek().kind == Tok::Comma && (next(), true));
    }
    expect(Tok::RParen, "')'");
    return args;
  }

  Stmt parse_send(std::string target, SourcePos pos) {
    Stmt s;
    s.kind = StmtKind::Send;
    s.pos = pos;
    s.target = std::move(target);
    expect(Tok::Dot, "'.'");
    s.name = ident("message server name");
    s.args = parse_args();
    for (;;) {
      const Token& t = peek();
      if (t.kind == Tok::KwAfter) {
        if (s.after) fail(t, "duplicate 'after' clause");
        next();
        expect(Tok::LParen, "'(' after 'after'");
        s.after = parse_expr();
        expect(Tok::RParen, "')'");
      } else if (t.kind == Tok::KwDeadline) {
        if (s.deadline) fail(t, "duplicate 'deadline' clause");
        next();
        expect(Tok::LParen, "'(' after 'deadline'");
        s.deadline = parse_expr();
        expect(Tok::RParen, "')'");
      } else {
        break;
      }
    }
    expect(Tok::Semi, "';' after message send");
    return s;
  }

  Stmt parse_stmt() {
    const Token& t = peek();
    Stmt s;
    s.pos = t.pos;
    switch (t.kind) {
      case Tok::KwAfter:
      case Tok::KwDeadline:
        fail(t, "'" + std::string(t.text) + "' can only be attached to a message send");
      case Tok::KwDelay: {
        next();
        s.kind = StmtKind::Delay;
        expect(Tok::LParen, "'(' after 'delay'");
        s.expr = parse_expr();
        expect(Tok::RParen, "')'");
        reject_timing_suffix("delay statement");
        expect(Tok::Semi, "';' after delay");
        return s;
      }
      case Tok::KwNow: {
        next();
        s.kind = StmtKind::NowNoop;
        expect(Tok::LParen, "'('");
        expect(Tok::RParen, "')'");
        expect(Tok::Semi, "';'");
        return s;
      }
      case Tok::KwIf: {
        next();
        s.kind = StmtKind::If;
        expect(Tok::LParen, "'(' after 'if'");
        s.expr = parse_expr();
        expect(Tok::RParen, "')'");
        s.then_block = parse_mst();
        if (peek().kind == Tok::KwElse) {
          next();
          s.has_else = true;
          s.else_block = parse_mst();
        }
        return s;
      }
      case Tok::KwSelf: next(); return parse_send("self", t.pos);
      case Tok::KwSender:
        fail(t, "messages cannot be sent to 'sender'; reply through a known rebec instead");
      case Tok::KwInt:
      case Tok::KwBoolean:
      case Tok::KwTime: return parse_local_decl();
      case Tok::Ident: {
        const Token& n = peek(1);
        if (n.kind == Tok::Ident) return parse_local_decl();
        if (n.kind == Tok::Dot) {
          next();
          return parse_send(std::string(t.text), t.pos);
        }
        if (n.kind == Tok::Assign) {
          next();
          next();
          s.target = std::string(t.text);
          if (peek().kind == Tok::KwNew) {
            next();
            s.kind = StmtKind::New;
            s.name = ident("class name after 'new'");
            s.args = parse_args();
          } else {
            s.kind = StmtKind::Assign;
            s.expr = parse_expr();
          }
          reject_timing_suffix("assignment");
          expect(Tok::Semi, "';' after assignment");
          return s;
        }
        fail(n, "expected '=', '.' or a variable name after " + describe(t) + ", found " +
                    describe(n));
      }
      default: fail(t, "expected a statement, found " + describe(t));
    }
  }

  void reject_timing_suffix(const std::string& what) {
    const Token& t = peek();
    if (t.kind == Tok::KwAfter || t.kind == Tok::KwDeadline) {
      fail(t, "'" + std::string(t.text) + "' can only be attached to a message send, not a " +
                  what);
    }
  }

  Stmt parse_local_decl() {
    Stmt s;
    s.kind = StmtKind::LocalDecl;
    s.pos = peek().pos;
    s.type = parse_type();
    s.target = ident("variable name");
    if (peek().kind == Tok::Assign) {
      next();
      if (peek().kind == Tok::KwNew) {
        fail(peek(), "declare the variable first, then assign 'new' to it");
      }
      s.expr = parse_expr();
    }
    expect(Tok::Semi, "';' after declaration");
    return s;
  }

  InstanceDecl parse_instance() {
    InstanceDecl d;
    d.pos = peek().pos;
    if (starts_statement(peek().kind) && peek().kind != Tok::Ident) {
      fail(peek(), "statement outside of a message server");
    }
    d.class_name = ident("class name in main");
    d.name = ident("instance name");
    expect(Tok::LParen, "'(' after instance name");
    if (peek().kind != Tok::RParen) {
      do {
        d.known_args.push_back(ident("known rebec instance name"));
      } while (peek().kind == Tok::Comma && (next(), true));
    }
    expect(Tok::RParen, "')'");
    expect(Tok::Colon, "':' between known rebecs and constructor arguments");
    d.ctor_args = parse_args();
    expect(Tok::Semi, "';' after instance declaration");
    return d;
  }

  // Expressions, C precedence.
  Expr parse_expr() { return parse_binary(1); }

  static std::optional<BinaryOp> binop(Tok k) {
    switch (k) {
      case Tok::OrOr: return BinaryOp::Or;
      case Tok::AndAnd: return BinaryOp::And;
      case Tok::EqEq: return BinaryOp::Eq;
      case Tok::NotEq: return BinaryOp::Ne;
      case Tok::Lt: return BinaryOp::Lt;
      case Tok::Le: return BinaryOp::Le;
      case Tok::Gt: return BinaryOp::Gt;
      case Tok::Ge: return BinaryOp::Ge;
      case Tok::Plus: return BinaryOp::Add;
      case Tok::Minus: return BinaryOp::Sub;
      case Tok::Star: return BinaryOp::Mul;
      case Tok::Slash: return BinaryOp::Div;
      case Tok::Percent: return BinaryOp::Mod;
      default: return std::nullopt;
    }
  }

  Expr parse_binary(int min_prec) {
    Expr lhs = parse_unary();
    for (;;) {
      auto op = binop(peek().kind);
      if (!op || binary_op_precedence(*op) < min_prec) return lhs;
      SourcePos p = next().pos;
      Expr rhs = parse_binary(binary_op_precedence(*op) + 1);
      lhs = Expr::binary(*op, std::move(lhs), std::move(rhs), p);
    }
  }

  Expr parse_unary() {
    const Token& t = peek();
    if (t.kind == Tok::Bang) {
      next();
      return Expr::unary(UnaryOp::Not, parse_unary(), t.pos);
    }
    if (t.kind == Tok::Minus) {
      next();
      return Expr::unary(UnaryOp::Neg, parse_unary(), t.pos);
    }
    return parse_primary();
  }

  Expr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int: next(); return Expr::int_lit(t.value, t.pos);
      case Tok::KwTrue: next(); return Expr::bool_lit(true, t.pos);
      case Tok::KwFalse: next(); return Expr::bool_lit(false, t.pos);
      case Tok::KwSelf: next(); return Expr::self(t.pos);
      case Tok::KwSender: next(); return Expr::sender(t.pos);
      case Tok::KwNow:
        next();
        expect(Tok::LParen, "'(' after 'now'");
        expect(Tok::RParen, "')'");
        return Expr::now(t.pos);
      case Tok::Ident: next(); return Expr::var(std::string(t.text), t.pos);
      case Tok::LParen: {
        next();
        Expr e = parse_expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Question: {
        next();
        auto alts = parse_args();
        if (alts.size() < 2) {
          fail(t, "nondeterministic choice needs at least two alternatives");
        }
        return Expr::choice(std::move(alts), t.pos);
      }
      case Tok::KwNew: fail(t, "'new' is only allowed as the right-hand side of an assignment");
      default: fail(t, "expected an expression, found " + describe(t));
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

ParseResult parse_model(std::string_view source) {
  ParseResult r;
  try {
    auto toks = Lexer(source).run();
    r.model = Parser(std::move(toks)).parse();
  } catch (const SyntaxError& e) {
    r.diagnostics.push_back(ParseError{e.pos, e.message, Severity::Error});
  }
  return r;
}

CheckResult load_model(std::string_view source) {
  auto parsed = parse_model(source);
  if (!parsed.model) return CheckResult{nullptr, std::move(parsed.diagnostics)};
  auto checked = validate_model(std::move(*parsed.model));
  parsed.diagnostics.insert(parsed.diagnostics.end(), checked.diagnostics.begin(),
                            checked.diagnostics.end());
  checked.diagnostics = std::move(parsed.diagnostics);
  return checked;
}

}  // namespace trebeca
