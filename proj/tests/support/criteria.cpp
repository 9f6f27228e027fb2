#include <filesystem>
#include <random>

#include "checks.hpp"
#include "model_gen.hpp"
#include "test_support.hpp"
#include "trebeca/erlang_backend.hpp"
#include "trebeca/explorer.hpp"
#include "trebeca/monitor.hpp"
#include "trebeca/parser.hpp"
#include "trebeca/pretty.hpp"
#include "trebeca/resolvers.hpp"
#include "trebeca/scheduler.hpp"

namespace tsupport {

using namespace trebeca;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> env_args(const Bindings& env) {
  std::vector<std::string> out;
  for (const auto& [k, v] : env) {
    out.push_back("--env");
    out.push_back(k + "=" + std::to_string(v));
  }
  return out;
}

std::string model_path(const std::string& name) { return (models_dir() / (name + ".rebeca")).string(); }

MonitorSpec monitor(const std::string& name) {
  return parse_monitor(read_file(models_dir() / (name + ".monitor")));
}

std::string row_name(const Bindings& env, const std::vector<std::string>& order) {
  std::string s = "(";
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(env.at(order[i]));
  }
  return s + ")";
}

const std::vector<std::string> kTicketOrder = {"requestDeadline",  "checkIssuedPeriod", "retryRequestPeriod",
                                               "newRequestPeriod", "serviceTime1",      "serviceTime2"};
const std::vector<std::string> kSensorOrder = {"netDelay",      "adminPeriod",       "sensor0Period",
                                               "sensor1Period", "scientistDeadline", "rescueDeadline"};

ExploreResult explore_to(const RunContext& ctx, std::int64_t horizon, std::size_t max_states = 2000000) {
  ExploreOptions opt;
  opt.bounds.horizon = TimeValue::from(horizon);
  opt.bounds.max_states = max_states;
  return explore(ctx, opt);
}

}  // namespace

CheckReport determinism(int repeats) {
  CheckReport r;
  auto dir = temp_dir("determinism");
  for (const auto& bm : bundled_models()) {
    std::string first;
    for (int i = 0; i < repeats; ++i) {
      auto path = (dir / (bm.name + "_" + std::to_string(i) + ".jsonl")).string();
      std::vector<std::string> args = {"run", model_path(bm.name), "--seed", "42", "--horizon", "40",
                                       "--trace", path};
      auto env = env_args(bm.env);
      args.insert(args.end(), env.begin(), env.end());
      auto res = cli(args);
      r.expect(res.code == 0, bm.name + ": run exited " + std::to_string(res.code) + " " + res.err);
      auto text = read_file(path);
      r.expect(!text.empty(), bm.name + ": empty trace");
      if (i == 0) {
        first = text;
      } else {
        r.expect(text == first, bm.name + ": trace " + std::to_string(i) + " differs from the first");
      }
    }
  }
  fs::remove_all(dir);
  return r;
}

CheckReport containment(int seeds, std::int64_t horizon) {
  CheckReport r;
  for (const auto& bm : bundled_models()) {
    auto ctx = context(load_bundled(bm.name), bm.env);
    auto graph = explore_to(ctx, horizon);
    r.expect(!graph.state_limit_hit, bm.name + ": exploration truncated");
    SchedulePolicy policy;
    policy.horizon = TimeValue::from(horizon);
    std::size_t contained = 0;
    for (int seed = 0; seed < seeds; ++seed) {
      auto run = stepped_run(ctx, static_cast<std::uint64_t>(seed), policy);
      auto reached = follow_path(graph, run.decisions);
      bool ok = reached && graph.states[*reached].key == state_key(run.last) &&
                graph.states[*reached].terminal.has_value() &&
                same_events_ignoring_step(graph.states[*reached].terminal_events, run.final_events);
      if (ok) {
        // Replaying the path gives the seeded run's observations.
        auto again = replay(ctx, graph, run.decisions);
        ok = again.events == trebeca::run(ctx, static_cast<std::uint64_t>(seed), policy).events;
      }
      if (ok) ++contained;
      r.expect(ok, bm.name + ": seed " + std::to_string(seed) + " is not a path of the graph");
    }
    r.expect(contained == static_cast<std::size_t>(seeds), bm.name + ": some runs escaped the graph");
  }
  return r;
}

CheckReport ticket_table() {
  CheckReport r;
  auto model = load_bundled("ticket_service");
  {
    auto env = ticket_env(2, 2, 1, 1, 3, 7);
    auto g = explore_to(context(model, env), 50);
    auto v = check_graph(g, monitor("ticket_issued"));
    r.expect(!g.state_limit_hit, "ticket " + row_name(env, kTicketOrder) + ": state limit reached");
    r.expect(v.exists.clauses[0].value == VerdictValue::Pass,
             "ticket " + row_name(env, kTicketOrder) + ": exists EVENTUALLY issued should pass");
  }
  for (auto env : {ticket_env(2, 1, 1, 1, 3, 7), ticket_env(2, 1, 1, 1, 4, 7), ticket_env(2, 2, 1, 1, 4, 7)}) {
    auto g = explore_to(context(model, env), 50);
    auto v = check_graph(g, monitor("ticket_not_issued"));
    r.expect(!g.state_limit_hit, "ticket " + row_name(env, kTicketOrder) + ": state limit reached");
    r.expect(v.forall.clauses[0].value == VerdictValue::Pass,
             "ticket " + row_name(env, kTicketOrder) + ": forall NEVER issued WITHIN 50 should pass");
  }
  return r;
}

CheckReport sensor_table(bool full) {
  CheckReport r;
  auto model = load_bundled("sensor_network");
  {
    auto env = sensor_env(1, 4, 2, 3, 2, 3);
    auto g = explore_to(context(model, env), 30);
    auto v = check_graph(g, monitor("mission_failed"));
    r.expect(!g.state_limit_hit, "sensor " + row_name(env, kSensorOrder) + ": state limit reached");
    r.expect(v.exists.clauses[0].value == VerdictValue::Pass,
             "sensor " + row_name(env, kSensorOrder) + ": exists mission failed should pass");
  }
  {
    auto env = sensor_env(1, 4, 2, 3, 2, 4);
    auto g = explore_to(context(model, env), 30);
    auto v = check_graph(g, monitor("mission_success"));
    r.expect(!g.state_limit_hit, "sensor " + row_name(env, kSensorOrder) + ": state limit reached");
    r.expect(v.forall.clauses[0].value == VerdictValue::Pass,
             "sensor " + row_name(env, kSensorOrder) + ": forall NEVER failed WITHIN 30 should pass");
    r.expect(v.exists.clauses[1].value == VerdictValue::Pass,
             "sensor " + row_name(env, kSensorOrder) + ": exists mission success should pass");
  }
  if (!full) return r;

  // The fast-admin configuration grows too quickly for exhaustive search, so
  // failure is shown by seeded runs, each of which is a path of the graph.
  auto failed = monitor("mission_failed");
  SchedulePolicy policy;
  policy.horizon = TimeValue::from(60);
  for (std::int64_t rdl : {5, 6, 7}) {
    auto env = sensor_env(2, 1, 1, 1, 4, rdl);
    auto ctx = context(model, env);
    int witnesses = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto t = run(ctx, seed, policy);
      if (check_trace(t, failed).clauses[0].value == VerdictValue::Pass) ++witnesses;
    }
    r.expect(witnesses > 0, "sensor " + row_name(env, kSensorOrder) + ": no run reached missionFailed");
  }
  {
    auto env = sensor_env(2, 4, 1, 1, 4, 7);
    auto ctx = context(model, env);
    int witnesses = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto t = run(ctx, seed, policy);
      if (check_trace(t, failed).clauses[0].value == VerdictValue::Pass) ++witnesses;
    }
    r.expect(witnesses == 0, "sensor " + row_name(env, kSensorOrder) + ": seeded runs should not fail");
    auto g = explore_to(ctx, 20);
    auto v = check_graph(g, monitor("mission_success_short"));
    r.expect(!g.state_limit_hit, "sensor " + row_name(env, kSensorOrder) + ": state limit reached");
    r.expect(v.forall.clauses[0].value == VerdictValue::Pass,
             "sensor " + row_name(env, kSensorOrder) + ": forall NEVER failed WITHIN 20 should pass");
    r.expect(v.exists.clauses[1].value == VerdictValue::Pass,
             "sensor " + row_name(env, kSensorOrder) + ": exists mission success should pass");
  }
  return r;
}

CheckReport erlang_goldens() {
  CheckReport r;
  auto program = emit_erlang(*load_bundled("ticket_service"));
  auto dir = golden_dir() / "ticket_service";
  std::size_t golden_files = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".erl") ++golden_files;
  }
  r.expect(golden_files == program.files.size(), "emitted file count differs from the goldens");
  for (const auto& f : program.files) {
    auto path = dir / f.name;
    if (!fs::exists(path)) {
      r.expect(false, "no golden for " + f.name);
      continue;
    }
    r.expect(read_file(path) == f.text, f.name + " differs from its golden");
    r.expect(balanced_delimiters(f.text), f.name + " has unbalanced delimiters");
  }

  auto shapes = emit_erlang(*load_source(R"(
reactiveclass Clock {
    knownrebecs {
        Clock peer;
    }
    statevars {
    }
    msgsrv initial() {
        delay(10);
        peer.tick() after(15);
    }
    msgsrv tick() {
    }
}

main {
    Clock c(c):();
}
)"));
  std::string clock;
  for (const auto& f : shapes.files) {
    if (f.name == "clock.erl") clock = f.text;
  }
  r.expect(clock.find("receive after 10 -> ok end") != std::string::npos, "literal delay shape");
  r.expect(clock.find("spawn(fun() ->\n") != std::string::npos &&
               clock.find("receive after 15 ->") != std::string::npos,
           "spawned after-send shape");

  auto out = temp_dir("emit-new");
  auto res = cli({"emit", model_path("factory"), "--out", out.string()});
  r.expect(res.code == 4, "emit with new should exit 4, got " + std::to_string(res.code));
  fs::remove_all(out);
  return r;
}

CheckReport round_trip_bundled() {
  CheckReport r;
  for (const auto& bm : bundled_models()) {
    auto parsed = parse_model(read_file(models_dir() / (bm.name + ".rebeca")));
    if (!parsed.model) {
      r.expect(false, bm.name + ": does not parse");
      continue;
    }
    auto again = parse_model(pretty_print(*parsed.model));
    r.expect(again.model && *again.model == *parsed.model, bm.name + ": parse . pretty_print is not identity");
  }
  return r;
}

CheckReport round_trip_generated(int models, std::uint64_t seed) {
  CheckReport r;
  std::mt19937_64 rng(seed);
  GenOptions opt;
  opt.allow_new = true;
  for (int i = 0; i < models; ++i) {
    auto m = generate_model(rng, opt);
    auto text = pretty_print(m);
    auto again = parse_model(text);
    r.expect(again.model && *again.model == m, "generated model " + std::to_string(i) + " does not round-trip");
    // Printing is a fixed point as well.
    r.expect(!again.model || pretty_print(*again.model) == text,
             "generated model " + std::to_string(i) + ": printing is not stable");
  }
  return r;
}

}  // namespace tsupport
