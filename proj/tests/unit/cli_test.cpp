#include "doctest.h"

#include <fstream>

#include "test_support.hpp"
#include "trebeca/cli.hpp"

using namespace trebeca::cli;
using tsupport::cli;
namespace fs = std::filesystem;

namespace {

std::string model(const std::string& name) { return (tsupport::models_dir() / (name + ".rebeca")).string(); }
std::string monitor(const std::string& name) { return (tsupport::models_dir() / (name + ".monitor")).string(); }

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("check") {
  auto ok = cli({"check", model("ticket_service")});
  CHECK(ok.code == kOk);
  CHECK(ok.out.find("ok (2 classes, 3 rebecs, 6 env variables)") != std::string::npos);

  auto dir = tsupport::temp_dir("cli-check");
  write(dir / "bad.rebeca", "reactiveclass A {\n msgsrv initial() { x = 1; }\n}\nmain { A a():(); }\n");
  auto bad = cli({"check", (dir / "bad.rebeca").string()});
  CHECK(bad.code == kModelError);
  CHECK(bad.err.find("bad.rebeca:2:") != std::string::npos);
  CHECK(cli({"check", (dir / "missing.rebeca").string()}).code == kIoError);
  fs::remove_all(dir);
}

TEST_CASE("usage errors") {
  CHECK(cli({}).code == kUsage);
  CHECK(cli({"frobnicate"}).code == kUsage);
  CHECK(cli({"--help"}).code == kOk);
  CHECK(cli({"run", model("coin"), "--seed", "x"}).code == kUsage);
  CHECK(cli({"run", model("coin"), "--deadline-check", "lazy"}).code == kUsage);
  auto unbound = cli({"run", model("pingpong"), "--horizon", "5"});
  CHECK(unbound.code == kUsage);
  CHECK(unbound.err.find("flight") != std::string::npos);
  CHECK(cli({"run", model("pingpong"), "--env", "flight"}).code == kUsage);
  CHECK(cli({"run", model("pingpong"), "--env", "flight=x"}).code == kUsage);
  CHECK(cli({"run", model("pingpong"), "--env", "flight=2", "--env", "nope=1"}).code == kUsage);
  CHECK(cli({"run", model("coin"), "--horizon", "-1"}).code == kUsage);
}

TEST_CASE("run exit codes follow the verdict") {
  CHECK(cli({"run", model("pingpong"), "--env", "flight=2", "--monitor", monitor("pingpong")}).code == kOk);
  // c.done happens at time 0 or 1 depending on the coin.
  bool saw_pass = false, saw_fail = false;
  for (int seed = 0; seed < 20; ++seed) {
    auto r = cli({"run", model("coin"), "--seed", std::to_string(seed), "--monitor", monitor("coin")});
    CHECK((r.code == kOk || r.code == kFail));
    saw_pass = saw_pass || r.code == kOk;
    saw_fail = saw_fail || r.code == kFail;
  }
  CHECK(saw_pass);
  CHECK(saw_fail);
  auto inc = cli({"run", model("ticket_service"), "--env-file", (tsupport::models_dir() / "ticket_issued.env").string(),
                  "--horizon", "3", "--monitor", monitor("ticket_issued")});
  CHECK(inc.code == kInconclusive);
  CHECK(inc.out.find("inconclusive\tEVENTUALLY selected a.ticketIssued") != std::string::npos);
}

TEST_CASE("runtime faults exit 70 with a location") {
  auto dir = tsupport::temp_dir("cli-fault");
  write(dir / "div.rebeca", "reactiveclass A {\n statevars { int x; }\n msgsrv initial() {\n  x = 1 / x;\n }\n}\nmain { A a():(); }\n");
  auto r = cli({"run", (dir / "div.rebeca").string(), "--max-steps", "3"});
  CHECK(r.code == kRuntimeError);
  CHECK(r.err.find("div.rebeca:4:") != std::string::npos);
  CHECK(r.err.find("division by zero") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("bad monitor files") {
  auto dir = tsupport::temp_dir("cli-monitor");
  write(dir / "bad.monitor", "EVENTUALLY selected\n");
  auto r = cli({"run", model("coin"), "--monitor", (dir / "bad.monitor").string()});
  CHECK(r.code == kModelError);
  CHECK(r.err.find("bad.monitor:1:") != std::string::npos);
  write(dir / "unknown.monitor", "EVENTUALLY selected zz.done\n");
  auto w = cli({"run", model("coin"), "--monitor", (dir / "unknown.monitor").string()});
  CHECK(w.err.find("warning") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("explore reports both quantifiers") {
  auto dir = tsupport::temp_dir("cli-explore");
  auto r = cli({"explore", model("coin"), "--monitor", monitor("coin"), "--graph", (dir / "g.dot").string(),
                "--witness", (dir / "w.jsonl").string()});
  CHECK(r.code == kFail);
  CHECK(r.out.find("explore: 5 states") != std::string::npos);
  CHECK(r.out.find("exists=pass forall=fail") != std::string::npos);
  CHECK(fs::exists(dir / "g.dot"));
  CHECK(tsupport::read_file(dir / "w.jsonl").find("run_ended") != std::string::npos);
  CHECK(cli({"explore", model("coin"), "--monitor", monitor("coin"), "--quantifier", "exists"}).code == kOk);
  auto limited = cli({"explore", model("ticket_service"), "--env-file",
                      (tsupport::models_dir() / "ticket_issued.env").string(), "--horizon", "50", "--max-states", "10"});
  CHECK(limited.out.find("state limit reached") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("emit") {
  auto dir = tsupport::temp_dir("cli-emit");
  auto ok = cli({"emit", model("ticket_service"), "--out", (dir / "erl").string()});
  CHECK(ok.code == kOk);
  CHECK(fs::exists(dir / "erl" / "agent.erl"));
  CHECK(cli({"emit", model("factory"), "--out", (dir / "f").string()}).code == kUnsupported);
  write(dir / "file", "x");
  CHECK(cli({"emit", model("ticket_service"), "--out", (dir / "file" / "sub").string()}).code == kIoError);
  fs::remove_all(dir);
}

TEST_CASE("sweep") {
  auto dir = tsupport::temp_dir("cli-sweep");
  auto spec = dir / "s.sweep";
  write(spec, "flight: [1..3]\nseeds: [1, 2]\nhorizon: 40\nmonitor: " + monitor("pingpong") + "\n");
  auto r = cli({"sweep", model("pingpong"), spec.string(), "--out", (dir / "out").string(), "--workers", "2"});
  CHECK(r.code == kOk);
  CHECK(r.err.find("3 parameter points x 2 seeds = 6 jobs") != std::string::npos);
  auto results = tsupport::read_file(dir / "out" / "results.csv");
  CHECK(results.rfind("point,flight,seed,verdict,termination,steps,trace,error\n", 0) == 0);
  CHECK(fs::exists(dir / "out" / "traces" / "p2_s2.jsonl"));
  auto summary = tsupport::read_file(dir / "out" / "summary.csv");
  CHECK(summary.find("0,1,2,") != std::string::npos);

  // Same inputs, same files, whatever the worker count.
  auto again = cli({"sweep", model("pingpong"), spec.string(), "--out", (dir / "again").string()});
  CHECK(again.code == kOk);
  CHECK(tsupport::read_file(dir / "again" / "results.csv") == results);

  CHECK(cli({"sweep", model("pingpong"), spec.string(), "--out", (dir / "x").string(), "--cap", "5"}).code == kUsage);
  CHECK(cli({"sweep", model("pingpong"), spec.string(), "--out", (dir / "x").string(), "--cap", "5", "--force"})
            .code == kOk);
  write(dir / "empty.sweep", "# nothing\n");
  CHECK(cli({"sweep", model("pingpong"), (dir / "empty.sweep").string()}).code == kUsage);
  write(dir / "bad.sweep", "flight: [1,\n");
  CHECK(cli({"sweep", model("pingpong"), (dir / "bad.sweep").string()}).code == kUsage);
  fs::remove_all(dir);
}

TEST_CASE("bundled sweep files") {
  auto dir = tsupport::temp_dir("cli-rows");
  auto r = cli({"sweep", model("ticket_service"), (tsupport::models_dir() / "ticket_rows.sweep").string(), "--out",
                dir.string()});
  CHECK(r.code == kOk);
  auto summary = tsupport::read_file(dir / "summary.csv");
  CHECK(summary.find("0,2,1,1,1,3,7,1,0,1,0,0,fail") != std::string::npos);
  CHECK(summary.find("2,2,2,1,1,3,7,1,1,0,0,0,pass") != std::string::npos);
  fs::remove_all(dir);
}
