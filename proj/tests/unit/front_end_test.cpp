#include "doctest.h"

#include "checks.hpp"
#include "test_support.hpp"
#include "trebeca/parser.hpp"
#include "trebeca/pretty.hpp"

using namespace trebeca;

namespace {

std::string all_messages(const Diagnostics& ds) {
  std::string s;
  for (const auto& d : ds) s += format_diagnostic("m", d) + "\n";
  return s;
}

// Wraps a class body in a minimal model with one instance.
std::string one_class(const std::string& body, const std::string& extra = "") {
  return extra + "reactiveclass A {\n" + body + "\n}\nmain {\n    A a():();\n}\n";
}

bool loads(const std::string& src) { return load_model(src).model != nullptr; }

bool rejects_with(const std::string& src, const std::string& fragment) {
  auto r = load_model(src);
  auto msgs = all_messages(r.diagnostics);
  INFO(msgs);
  return r.model == nullptr && msgs.find(fragment) != std::string::npos;
}

}  // namespace

TEST_CASE("bundled models load without diagnostics") {
  for (const auto& bm : tsupport::bundled_models()) {
    CAPTURE(bm.name);
    auto r = load_model(tsupport::read_file(tsupport::models_dir() / (bm.name + ".rebeca")));
    CHECK(r.model != nullptr);
    CHECK_MESSAGE(r.diagnostics.empty(), all_messages(r.diagnostics));
  }
}

TEST_CASE("syntax errors carry positions") {
  auto r = parse_model("reactiveclass A {\n  statevars { int x }\n}\n");
  REQUIRE_FALSE(r.model);
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(r.diagnostics[0].pos.line == 2);
  CHECK(format_diagnostic("f.rebeca", r.diagnostics[0]).rfind("f.rebeca:2:", 0) == 0);

  CHECK_FALSE(parse_model("").model);
  CHECK_FALSE(parse_model("main { A a():() }").model);
  CHECK_FALSE(parse_model(one_class("msgsrv initial() { int x = ?(1); }")).model);
}

TEST_CASE("comments, queue bounds and operator precedence") {
  auto src = "// leading\nreactiveclass A(5) {\n /* block */ statevars { int x; }\n"
             "msgsrv initial() { x = 1 + 2 * 3 - 4 / 2 % 3; }\n}\nmain { A a():(); }\n";
  auto r = load_model(src);
  REQUIRE(r.model);
  CHECK(r.model->cls(0).queue_bound == 5);
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(r.diagnostics[0].severity == Severity::Warning);
  const auto& e = *r.model->method(0, 0).body[0].expr;
  CHECK(pretty_print(e) == "1 + 2 * 3 - 4 / 2 % 3");
  REQUIRE(e.kind == ExprKind::Binary);
  CHECK(e.bop == BinaryOp::Sub);

  auto p = parse_model(one_class("statevars { boolean b; int x; }\nmsgsrv initial() { b = !(x < 1) || x == 2 && true; }"));
  REQUIRE(p.model);
  const auto& b = *p.model->classes[0].methods[0].body[0].expr;
  CHECK(b.bop == BinaryOp::Or);
  CHECK(b.operands[1].bop == BinaryOp::And);
}

TEST_CASE("pretty printing parenthesises only where needed") {
  auto p = parse_model(one_class("statevars { int x; }\nmsgsrv initial() { x = (1 + 2) * -(3 - (4 - 5)); }"));
  REQUIRE(p.model);
  CHECK(pretty_print(*p.model->classes[0].methods[0].body[0].expr) == "(1 + 2) * -(3 - (4 - 5))");
}

TEST_CASE("name and type errors") {
  CHECK(rejects_with(one_class("msgsrv initial() { y = 1; }"), "unknown name 'y'"));
  CHECK(rejects_with(one_class("statevars { int x; }\nmsgsrv initial() { x = true; }"), "cannot assign"));
  CHECK(rejects_with(one_class("statevars { int x; }\nmsgsrv initial() { if (x) { } }"), "must be boolean"));
  CHECK(rejects_with(one_class("statevars { int x; }\nmsgsrv initial() { x = 1 + true; }"), "must be int"));
  CHECK(rejects_with(one_class("statevars { int x; }\nmsgsrv initial() { x = ?(1, false); }"),
                     "alternatives of '?' must have the same type"));
  CHECK(rejects_with(one_class("statevars { boolean b; }\nmsgsrv initial() { b = 1 == false; }"), "cannot compare"));
  CHECK(rejects_with(one_class("msgsrv initial() { self.go(1); }\nmsgsrv go() { }"), "expects 0 argument(s), got 1"));
  CHECK(rejects_with(one_class("msgsrv initial() { self.go(true); }\nmsgsrv go(int n) { }"), "argument 1"));
  CHECK(rejects_with(one_class("msgsrv initial() { self.nope(); }"), "has no message server 'nope'"));
  CHECK(rejects_with(one_class("msgsrv initial() { delay(true); }"), "must be int"));
  CHECK(rejects_with(one_class("msgsrv initial() { self.initial() after(false); }"), "must be int"));
  CHECK(rejects_with(one_class("msgsrv initial() { int x = 1; int x = 2; }"), "already declared"));
  CHECK(rejects_with(one_class("msgsrv initial() { }\nmsgsrv initial() { }"), "duplicate message server"));
  CHECK(rejects_with(one_class("msgsrv go() { }"), "has no 'initial'"));
  CHECK(rejects_with(one_class("msgsrv initial() { e = 1; }", "env int e;\n"), "read-only"));
  CHECK(rejects_with(one_class("msgsrv go(int a, int a) { }\nmsgsrv initial() { }"), "duplicate parameter"));
  CHECK(rejects_with(one_class("statevars { int x; int x; }\nmsgsrv initial() { }"), "duplicate variable"));
  CHECK(rejects_with("env int e;\nenv int e;\n" + one_class("msgsrv initial() { }"), "duplicate env variable"));
}

TEST_CASE("main block checks") {
  const std::string cls = "reactiveclass A {\n knownrebecs { A peer; }\n statevars { int x; }\n msgsrv initial() { }\n}\n";
  CHECK(loads(cls + "main { A a(a):(1); }"));
  CHECK(rejects_with(cls + "main { A a():(1); }", "needs 1"));
  CHECK(rejects_with(cls + "main { A a(b):(1); }", "unknown instance 'b'"));
  CHECK(rejects_with(cls + "main { A a(a):(1, 2); }", "has 1"));
  CHECK(rejects_with(cls + "main { A a(a):(); A a(a):(); }", "duplicate instance name"));
  CHECK(rejects_with(cls + "main { B b():(); }", "unknown reactive class 'B'"));
  CHECK(rejects_with(cls + "main { A a(a):(now()); }", "constructor arguments may only use literals"));
  CHECK(rejects_with("reactiveclass A {\n msgsrv initial(int n) { }\n}\nmain { A a():(); }",
                     "is created in main"));
  CHECK(loads("env int e;\n" + cls + "main { A a(a):(e * 2 + 1); }"));
}

TEST_CASE("rebec references and creation") {
  const std::string src =
      "reactiveclass W {\n msgsrv initial(int n) { }\n msgsrv job() { }\n}\n"
      "reactiveclass B {\n knownrebecs { W fixed; }\n statevars { W w; }\n"
      " msgsrv initial() { w = new W(1); w.job(); }\n"
      " msgsrv swap() { fixed = w; }\n}\n"
      "main { W w0():(); B b(w0):(); }\n";
  // 'initial' of W takes a parameter, so W cannot be created in main.
  CHECK(rejects_with(src, "known rebec 'fixed' cannot be reassigned"));
  CHECK(rejects_with("reactiveclass W {\n msgsrv initial(int n) { }\n}\n"
                     "reactiveclass B {\n statevars { W w; }\n msgsrv initial() { w = new W(true); }\n}\n"
                     "main { B b():(); }",
                     "argument 1"));
  CHECK(rejects_with("reactiveclass B {\n statevars { int x; }\n msgsrv initial() { x.go(); }\n}\nmain { B b():(); }",
                     "is not a rebec reference"));
  CHECK(loads("reactiveclass W {\n msgsrv initial(int n) { }\n msgsrv job() { }\n}\n"
              "reactiveclass B {\n statevars { W w; }\n msgsrv initial() { w = new W(1); w.job(); }\n}\n"
              "main { B b():(); }"));
}

TEST_CASE("round trip on bundled models") {
  auto r = tsupport::round_trip_bundled();
  CHECK_MESSAGE(r.ok(), r.summary());
}
