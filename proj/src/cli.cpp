#include "trebeca/cli.hpp"

#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "trebeca/erlang_backend.hpp"
#include "trebeca/explorer.hpp"
#include "trebeca/monitor.hpp"
#include "trebeca/parser.hpp"
#include "trebeca/scheduler.hpp"
#include "trebeca/sweep.hpp"

namespace trebeca::cli {
namespace {

namespace fs = std::filesystem;

// Carries an exit code out of a command after the message was printed.
struct Exit {
  int code;
};

struct Common {
  std::string model;
  std::vector<std::string> env;
  std::string env_file;
  std::string deadline_check = "literal";
};

std::string read_file(const std::string& path, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << "error: cannot read " << path << "\n";
    throw Exit{kIoError};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text, std::ostream& err) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (out) out << text;
  if (!out) {
    err << "error: cannot write " << path.string() << "\n";
    throw Exit{kIoError};
  }
}

std::shared_ptr<const CheckedModel> load(const std::string& path, std::ostream& err) {
  auto text = read_file(path, err);
  auto result = load_model(text);
  for (const auto& d : result.diagnostics) err << format_diagnostic(path, d) << "\n";
  if (!result.model) throw Exit{kModelError};
  return result.model;
}

std::int64_t parse_env_value(const std::string& name, const std::string& text, std::ostream& err) {
  if (text == "true") return 1;
  if (text == "false") return 0;
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) {
    err << "error: value of env variable '" << name << "' is not an integer: '" << text << "'\n";
    throw Exit{kUsage};
  }
  return v;
}

void add_binding(std::unordered_map<std::string, std::int64_t>& out, const std::string& item,
                 std::ostream& err) {
  auto eq = item.find('=');
  if (eq == std::string::npos || eq == 0) {
    err << "error: expected name=value, got '" << item << "'\n";
    throw Exit{kUsage};
  }
  auto name = item.substr(0, eq);
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  name = trim(name);
  out[name] = parse_env_value(name, trim(item.substr(eq + 1)), err);
}

std::unordered_map<std::string, std::int64_t> bindings(const Common& c, std::ostream& err) {
  std::unordered_map<std::string, std::int64_t> out;
  if (!c.env_file.empty()) {
    std::istringstream in(read_file(c.env_file, err));
    std::string line;
    while (std::getline(in, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      add_binding(out, line, err);
    }
  }
  for (const auto& e : c.env) add_binding(out, e, err);
  return out;
}

RunContext context(std::shared_ptr<const CheckedModel> model,
                   const std::unordered_map<std::string, std::int64_t>& env, std::ostream& err) {
  try {
    return make_context(std::move(model), env);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << " (use --env name=value)\n";
    throw Exit{kUsage};
  }
}

DeadlineCheck deadline_mode(const std::string& s) {
  return s == "effective" ? DeadlineCheck::Effective : DeadlineCheck::Literal;
}

std::optional<MonitorSpec> load_monitor(const std::string& path, const CheckedModel& model,
                                        std::ostream& err) {
  if (path.empty()) return std::nullopt;
  auto text = read_file(path, err);
  try {
    auto spec = parse_monitor(text);
    for (const auto& name : unknown_pattern_names(spec, model)) {
      err << path << ": warning: '" << name << "' names no rebec, class or message server of the model\n";
    }
    return spec;
  } catch (const MonitorSyntaxError& e) {
    err << path << ":" << e.line() << ":" << e.column() << ": error: "
        << std::string(e.what()).substr(std::string(e.what()).find(": ") + 2) << "\n";
    throw Exit{kModelError};
  }
}

int verdict_exit(VerdictValue v) {
  switch (v) {
    case VerdictValue::Pass: return kOk;
    case VerdictValue::Fail: return kFail;
    case VerdictValue::Inconclusive: return kInconclusive;
  }
  return kOk;
}

std::string covered_text(const RunEnd& end) {
  return end.covered_until == RunEnd::kEverything ? "inf" : std::to_string(end.covered_until);
}

// ---------------------------------------------------------------- commands

int cmd_check(const Common& c, std::ostream& out, std::ostream& err) {
  auto model = load(c.model, err);
  out << c.model << ": ok (" << model->class_count() << " classes, " << model->model().main.size()
      << " rebecs, " << model->model().env_decls.size() << " env variables)\n";
  return kOk;
}

struct RunArgs {
  std::uint64_t seed = 0;
  std::optional<std::int64_t> horizon;
  std::optional<std::uint64_t> max_steps;
  std::string monitor;
  std::string trace;
  bool fixed_ties = false;
};

SchedulePolicy run_policy(const Common& c, const RunArgs& r, std::ostream& err) {
  SchedulePolicy p;
  p.deadline_check = deadline_mode(c.deadline_check);
  p.tie_break = r.fixed_ties ? TieBreak::FixedOrder : TieBreak::SeededUniform;
  if (r.horizon) {
    if (*r.horizon < 0) {
      err << "error: --horizon must be non-negative\n";
      throw Exit{kUsage};
    }
    p.horizon = TimeValue::from(*r.horizon);
  }
  p.max_steps = r.max_steps;
  if (!p.horizon && !p.max_steps) p.max_steps = 100000;
  return p;
}

int cmd_run(const Common& c, const RunArgs& r, std::ostream& out, std::ostream& err) {
  auto model = load(c.model, err);
  auto ctx = context(model, bindings(c, err), err);
  auto monitor = load_monitor(r.monitor, *model, err);
  auto policy = run_policy(c, r, err);
  Trace trace;
  try {
    trace = run(ctx, r.seed, policy);
  } catch (const RuntimeError& e) {
    err << c.model << ":" << e.pos().line << ":" << e.pos().column << ": " << e.what() << "\n";
    return kRuntimeError;
  }
  if (!r.trace.empty()) {
    if (r.trace == "-") {
      out << to_jsonl(trace);
    } else {
      write_file(r.trace, to_jsonl(trace), err);
    }
  }
  out << "run: " << trace.decisions.size() << " steps, ended by "
      << termination_reason_name(trace.end.reason) << ", covered until " << covered_text(trace.end)
      << "\n";
  if (!monitor) return kOk;
  auto verdict = check_trace(trace, *monitor);
  for (std::size_t i = 0; i < monitor->clauses.size(); ++i) {
    out << verdict_name(verdict.clauses[i].value) << "\t" << monitor->clauses[i].text << "\n";
  }
  return verdict_exit(verdict.overall());
}

struct ExploreArgs {
  std::optional<std::int64_t> horizon;
  std::optional<std::uint64_t> max_steps;
  std::size_t max_states = 200000;
  unsigned workers = 1;
  std::string monitor;
  std::string graph;
  std::string witness;
  std::string quantifier = "forall";
};

ExploreOptions explore_options(const Common& c, const ExploreArgs& a, std::ostream& err) {
  ExploreOptions o;
  o.deadline_check = deadline_mode(c.deadline_check);
  if (a.horizon) {
    if (*a.horizon < 0) {
      err << "error: --horizon must be non-negative\n";
      throw Exit{kUsage};
    }
    o.bounds.horizon = TimeValue::from(*a.horizon);
  }
  o.bounds.max_steps = a.max_steps;
  o.bounds.max_states = a.max_states;
  o.workers = a.workers;
  return o;
}

std::vector<StepDecisions> decisions_of(const ExploreResult& g, const std::vector<std::uint32_t>& path) {
  std::vector<StepDecisions> out;
  for (auto e : path) out.push_back(g.edges[e].decision);
  return out;
}

int cmd_explore(const Common& c, const ExploreArgs& a, std::ostream& out, std::ostream& err) {
  auto model = load(c.model, err);
  auto ctx = context(model, bindings(c, err), err);
  auto monitor = load_monitor(a.monitor, *model, err);
  auto result = explore(ctx, explore_options(c, a, err));
  out << "explore: " << result.states.size() << " states, " << result.edges.size() << " edges, "
      << result.terminal_count() << " terminals" << (result.state_limit_hit ? ", state limit reached" : result.truncated ? ", truncated" : "") << "\n";
  for (StateId s = 0; s < result.states.size(); ++s) {
    if (!result.states[s].error.empty()) {
      err << "warning: state " << s << " ends in a runtime error: " << result.states[s].error << "\n";
    }
  }
  if (!a.graph.empty()) {
    bool dot = fs::path(a.graph).extension() == ".dot";
    write_file(a.graph, dot ? to_dot(result) : to_json(result), err);
  }
  if (!monitor) return kOk;
  auto gv = check_graph(result, *monitor);
  for (std::size_t i = 0; i < monitor->clauses.size(); ++i) {
    out << "exists=" << verdict_name(gv.exists.clauses[i].value)
        << " forall=" << verdict_name(gv.forall.clauses[i].value) << "\t" << monitor->clauses[i].text
        << "\n";
  }
  const auto& chosen = a.quantifier == "exists" ? gv.exists : gv.forall;
  if (!a.witness.empty() && !chosen.clauses.empty()) {
    // Witness of the first clause that is not a pass, else of the first clause.
    std::size_t pick = 0;
    for (std::size_t i = 0; i < chosen.clauses.size(); ++i) {
      if (chosen.clauses[i].value != VerdictValue::Pass) {
        pick = i;
        break;
      }
    }
    auto trace = replay(ctx, result, decisions_of(result, chosen.clauses[pick].witness_path));
    write_file(a.witness, to_jsonl(trace), err);
  }
  return verdict_exit(chosen.overall());
}

int cmd_emit(const Common& c, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  auto model = load(c.model, err);
  EmittedProgram program;
  try {
    program = emit_erlang(*model);
  } catch (const UnsupportedFeature& e) {
    err << c.model << ":" << e.pos().line << ":" << e.pos().column << ": error: " << e.what() << "\n";
    return kUnsupported;
  }
  try {
    write_program(program, out_dir);
  } catch (const std::exception& e) {
    err << "error: cannot write to " << out_dir << ": " << e.what() << "\n";
    return kIoError;
  }
  for (const auto& f : program.files) out << (fs::path(out_dir) / f.name).string() << "\n";
  return kOk;
}

// ------------------------------------------------------------------- sweep

struct SweepJob {
  std::size_t point = 0;
  std::uint64_t seed = 0;
  std::string verdict = "n/a";
  std::string termination;
  std::size_t size = 0;
  std::string trace;  // JSONL, run mode
  std::string error;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

int cmd_sweep(const Common& c, const std::string& spec_path, const std::string& out_dir,
              bool force, std::size_t cap, unsigned workers, std::ostream& out, std::ostream& err) {
  auto model = load(c.model, err);
  SweepSpec spec;
  try {
    spec = parse_sweep(read_file(spec_path, err));
  } catch (const SweepError& e) {
    err << spec_path << ": error: " << e.what() << "\n";
    throw Exit{kUsage};
  }
  auto fixed = bindings(c, err);
  std::optional<MonitorSpec> monitor;
  if (!spec.monitor.empty()) {
    fs::path mp = spec.monitor;
    if (mp.is_relative()) mp = fs::path(spec_path).parent_path() / mp;
    monitor = load_monitor(mp.string(), *model, err);
  }

  const bool explore_mode = spec.mode == "explore";
  const std::size_t points = spec.point_count();
  const std::size_t runs = spec.run_count();
  err << "sweep: " << points << " parameter points x " << (explore_mode ? 1 : spec.seeds.size())
      << (explore_mode ? " exploration" : " seeds") << " = " << runs << " jobs\n";
  if (runs > cap && !force) {
    err << "error: " << runs << " jobs exceed the cap of " << cap << "; pass --force to run anyway\n";
    throw Exit{kUsage};
  }

  std::vector<RunContext> contexts;
  for (std::size_t p = 0; p < points; ++p) {
    auto env = fixed;
    for (const auto& [k, v] : spec.point(p)) env[k] = v;
    contexts.push_back(context(model, env, err));
  }

  std::vector<SweepJob> jobs;
  for (std::size_t p = 0; p < points; ++p) {
    if (explore_mode) {
      jobs.push_back(SweepJob{p, 0});
    } else {
      for (auto s : spec.seeds) jobs.push_back(SweepJob{p, s});
    }
  }

  SchedulePolicy policy;
  policy.deadline_check = deadline_mode(spec.deadline_check);
  if (spec.horizon) policy.horizon = TimeValue::from(*spec.horizon);
  policy.max_steps = spec.max_steps;
  if (!policy.horizon && !policy.max_steps) policy.max_steps = 100000;
  ExploreOptions xo;
  xo.deadline_check = policy.deadline_check;
  xo.bounds.horizon = policy.horizon;
  xo.bounds.max_steps = spec.max_steps;
  xo.bounds.max_states = spec.max_states ? spec.max_states : std::optional<std::size_t>(200000);
  const bool exists = spec.quantifier == "exists";

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      auto& job = jobs[i];
      const auto& ctx = contexts[job.point];
      try {
        if (explore_mode) {
          auto g = explore(ctx, xo);
          job.size = g.states.size();
          job.termination = g.state_limit_hit ? "state_limit" : g.truncated ? "truncated" : "complete";
          if (monitor) {
            auto gv = check_graph(g, *monitor);
            job.verdict = verdict_name((exists ? gv.exists : gv.forall).overall());
          }
        } else {
          auto trace = run(ctx, job.seed, policy);
          job.size = trace.decisions.size();
          job.termination = termination_reason_name(trace.end.reason);
          if (monitor) job.verdict = verdict_name(check_trace(trace, *monitor).overall());
          job.trace = to_jsonl(trace);
        }
      } catch (const RuntimeError& e) {
        job.termination = "error";
        job.error = e.what();
      }
    }
  };
  workers = std::max(1u, workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Single collector: all files are written here, in job order.
  fs::path dir = out_dir;
  std::string header = "point";
  for (const auto& [k, vs] : spec.env) header += "," + k;
  std::ostringstream results;
  results << header << ",seed,verdict,termination," << (explore_mode ? "states" : "steps")
          << ",trace,error\n";
  int worst = kOk;
  for (const auto& job : jobs) {
    std::string trace_path;
    if (!explore_mode && !job.trace.empty()) {
      trace_path = "traces/p" + std::to_string(job.point) + "_s" + std::to_string(job.seed) + ".jsonl";
      write_file(dir / trace_path, job.trace, err);
    }
    results << job.point;
    for (const auto& [k, v] : spec.point(job.point)) results << "," << v;
    results << "," << (explore_mode ? std::string{} : std::to_string(job.seed)) << "," << job.verdict
            << "," << job.termination << "," << job.size << "," << trace_path << ","
            << csv_field(job.error) << "\n";
    if (!job.error.empty()) worst = std::max(worst, kRuntimeError);
  }
  write_file(dir / "results.csv", results.str(), err);

  std::ostringstream summary;
  summary << header << ",jobs,pass,fail,inconclusive,errors,verdict\n";
  for (std::size_t p = 0; p < points; ++p) {
    std::size_t n = 0, pass = 0, fail = 0, inc = 0, errors = 0;
    for (const auto& job : jobs) {
      if (job.point != p) continue;
      ++n;
      if (!job.error.empty()) ++errors;
      if (job.verdict == "pass") ++pass;
      if (job.verdict == "fail") ++fail;
      if (job.verdict == "inconclusive") ++inc;
    }
    std::string verdict = "n/a";
    if (monitor) {
      // Aggregate like the quantifier: exists looks for one pass, forall for one failure.
      if (exists) {
        verdict = pass ? "pass" : inc ? "inconclusive" : "fail";
      } else {
        verdict = fail ? "fail" : inc ? "inconclusive" : "pass";
      }
    }
    summary << p;
    for (const auto& [k, v] : spec.point(p)) summary << "," << v;
    summary << "," << n << "," << pass << "," << fail << "," << inc << "," << errors << "," << verdict
            << "\n";
    out << "point " << p << ":";
    for (const auto& [k, v] : spec.point(p)) out << " " << k << "=" << v;
    out << " -> " << verdict << "\n";
  }
  write_file(dir / "summary.csv", summary.str(), err);
  return worst;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Timed Rebeca toolkit: check, simulate, explore, sweep and translate models", "trebeca"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub, bool with_env) {
    sub->add_option("model", common.model, "Model file (.rebeca)")->required();
    if (with_env) {
      sub->add_option("--env", common.env, "Bind an env variable, name=value (repeatable)");
      sub->add_option("--env-file", common.env_file, "File with name=value lines");
      sub->add_option("--deadline-check", common.deadline_check,
                      "Deadline test: literal (now <= dl) or effective (max(tt, now) <= dl)")
          ->check(CLI::IsMember({"literal", "effective"}));
    }
  };

  auto* check = app.add_subcommand("check", "Parse and validate a model");
  add_common(check, false);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Simulate one seeded run");
  add_common(run_cmd, true);
  run_cmd->add_option("--seed", run_args.seed, "Seed for ties and ? choices");
  run_cmd->add_option("--horizon", run_args.horizon, "Stop before serving messages with tt beyond this time");
  run_cmd->add_option("--max-steps", run_args.max_steps, "Stop after this many scheduler steps");
  run_cmd->add_option("--monitor", run_args.monitor, "Monitor clause file");
  run_cmd->add_option("--trace", run_args.trace, "Write the JSONL trace here ('-' for stdout)");
  run_cmd->add_flag("--fixed-ties", run_args.fixed_ties, "Break ties by canonical bag order");

  ExploreArgs explore_args;
  auto* explore_cmd = app.add_subcommand("explore", "Enumerate every interleaving and choice");
  add_common(explore_cmd, true);
  explore_cmd->add_option("--horizon", explore_args.horizon, "Time bound");
  explore_cmd->add_option("--max-steps", explore_args.max_steps, "Path length bound");
  explore_cmd->add_option("--max-states", explore_args.max_states, "Stop expanding once this many states are stored");
  explore_cmd->add_option("--workers", explore_args.workers, "Worker threads");
  explore_cmd->add_option("--monitor", explore_args.monitor, "Monitor clause file");
  explore_cmd->add_option("--graph", explore_args.graph, "Write the state graph (.json or .dot)");
  explore_cmd->add_option("--witness", explore_args.witness, "Write the witness run of the reported verdict as JSONL");
  explore_cmd->add_option("--quantifier", explore_args.quantifier, "Verdict that sets the exit code")
      ->check(CLI::IsMember({"exists", "forall"}));

  std::string sweep_spec, sweep_out = "sweep-out";
  bool sweep_force = false;
  std::size_t sweep_cap = 10000;
  unsigned sweep_workers = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep");
  add_common(sweep_cmd, true);
  sweep_cmd->add_option("spec", sweep_spec, "Sweep file (key: value lines)")->required();
  sweep_cmd->add_option("--out", sweep_out, "Output directory");
  sweep_cmd->add_flag("--force", sweep_force, "Run even when the job count exceeds the cap");
  sweep_cmd->add_option("--cap", sweep_cap, "Largest job count run without --force");
  sweep_cmd->add_option("--workers", sweep_workers, "Worker threads");

  std::string emit_out = "erlang-out";
  auto* emit_cmd = app.add_subcommand("emit", "Translate a model to Erlang source");
  add_common(emit_cmd, false);
  emit_cmd->add_option("--out", emit_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run 'trebeca --help' for usage\n";
    return kUsage;
  }

  try {
    if (check->parsed()) return cmd_check(common, out, err);
    if (run_cmd->parsed()) return cmd_run(common, run_args, out, err);
    if (explore_cmd->parsed()) return cmd_explore(common, explore_args, out, err);
    if (sweep_cmd->parsed()) {
      return cmd_sweep(common, sweep_spec, sweep_out, sweep_force, sweep_cap, sweep_workers, out, err);
    }
    if (emit_cmd->parsed()) return cmd_emit(common, emit_out, out, err);
  } catch (const Exit& e) {
    return e.code;
  }
  return kUsage;
}

}  // namespace trebeca::cli
