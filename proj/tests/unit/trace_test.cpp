#include "doctest.h"

#include <sstream>

#include "json.hpp"
#include "test_support.hpp"
#include "trebeca/scheduler.hpp"

using namespace trebeca;

TEST_CASE("JSON lines keep a fixed field order") {
  auto ctx = tsupport::context(tsupport::load_bundled("pingpong"), {{"flight", 2}});
  SchedulePolicy p;
  p.max_steps = 4;
  auto text = to_jsonl(run(ctx, 0, p));
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() > 3);
  CHECK(lines[1] ==
        R"({"step":0,"kind":"msg_sent","time":0,"rebec":"ping","method":"initial","sender":"external","tt":0,"dl":"inf"})");
  const std::vector<std::string> keys = {"step", "kind", "time", "rebec", "method", "sender", "tt", "dl"};
  for (const auto& l : lines) {
    auto j = nlohmann::ordered_json::parse(l);
    std::vector<std::string> got;
    for (auto it = j.begin(); it != j.end(); ++it) got.push_back(it.key());
    auto want = keys;
    if (j["kind"] == "run_ended") {
      want.push_back("reason");
      want.push_back("covered");
    }
    CHECK(got == want);
  }
  auto last = nlohmann::json::parse(lines.back());
  CHECK(last["reason"] == "max_steps");
  CHECK(last["covered"] == 4);  // next pending tt is 5
}

TEST_CASE("finite deadlines and created rebecs") {
  auto ctx = tsupport::context(tsupport::load_bundled("factory"));
  SchedulePolicy p;
  p.horizon = TimeValue::from(20);
  auto text = to_jsonl(run(ctx, 0, p));
  CHECK(text.find(R"("kind":"rebec_created","time":0,"rebec":"Worker#1")") != std::string::npos);
  CHECK(text.find(R"("method":"job","sender":"boss","tt":0,"dl":2})") != std::string::npos);
  CHECK(text.find(R"("kind":"msg_purged")") != std::string::npos);
}

TEST_CASE("names of kinds and reasons") {
  CHECK(std::string(event_kind_name(EventKind::DelayExecuted)) == "delay_executed");
  CHECK(std::string(termination_reason_name(TerminationReason::AllExpired)) == "all_expired");
  CHECK(std::string(termination_reason_name(TerminationReason::MaxStates)) == "max_states");
}
