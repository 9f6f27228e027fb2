#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <sstream>

#include "trebeca/erlang_backend.hpp"
#include "trebeca/explorer.hpp"
#include "trebeca/monitor.hpp"
#include "trebeca/parser.hpp"
#include "trebeca/pretty.hpp"
#include "trebeca/scheduler.hpp"

namespace py = pybind11;
using namespace trebeca;

namespace {

using Bindings = std::unordered_map<std::string, std::int64_t>;

struct PyModel {
  std::shared_ptr<const CheckedModel> model;
  std::vector<std::string> warnings;
};

struct PyGraph {
  RunContext ctx;
  ExploreResult result;
};

DeadlineCheck deadline_mode(const std::string& s) {
  if (s == "literal") return DeadlineCheck::Literal;
  if (s == "effective") return DeadlineCheck::Effective;
  throw py::value_error("deadline_check must be 'literal' or 'effective'");
}

std::optional<TimeValue> horizon_of(std::optional<std::int64_t> h) {
  if (!h) return std::nullopt;
  if (*h < 0) throw py::value_error("horizon must be non-negative");
  return TimeValue::from(*h);
}

RunContext context_of(const PyModel& m, const Bindings& env) {
  try {
    return make_context(m.model, env);
  } catch (const std::invalid_argument& e) {
    throw py::value_error(e.what());
  }
}

std::vector<std::string> verdict_names(const Verdict& v) {
  std::vector<std::string> out;
  for (const auto& c : v.clauses) out.emplace_back(verdict_name(c.value));
  return out;
}

}  // namespace

PYBIND11_MODULE(_trebeca, m) {
  m.doc() = "Timed Rebeca front end, simulator, explorer and monitors";

  static py::exception<std::runtime_error> model_error(m, "ModelError", PyExc_ValueError);
  static py::exception<RuntimeError> runtime_fault(m, "RuntimeFault", PyExc_RuntimeError);
  static py::exception<UnsupportedFeature> unsupported(m, "UnsupportedFeature", PyExc_NotImplementedError);
  static py::exception<MonitorSyntaxError> monitor_error(m, "MonitorSyntaxError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const RuntimeError& e) {
      py::set_error(runtime_fault, e.what());
    } catch (const UnsupportedFeature& e) {
      py::set_error(unsupported, e.what());
    } catch (const MonitorSyntaxError& e) {
      py::set_error(monitor_error, e.what());
    }
  });

  py::class_<PyModel>(m, "Model")
      .def_static(
          "load",
          [](const std::string& source, const std::string& name) {
            auto res = load_model(source);
            std::vector<std::string> warnings, errors;
            for (const auto& d : res.diagnostics) {
              (d.severity == Severity::Error ? errors : warnings).push_back(format_diagnostic(name, d));
            }
            if (!res.model) {
              std::ostringstream os;
              for (std::size_t i = 0; i < errors.size(); ++i) os << (i ? "\n" : "") << errors[i];
              py::set_error(model_error, os.str().c_str());
              throw py::error_already_set();
            }
            return PyModel{res.model, warnings};
          },
          py::arg("source"), py::arg("name") = "<string>")
      .def_readonly("warnings", &PyModel::warnings)
      .def_property_readonly("env_names",
                             [](const PyModel& pm) {
                               std::vector<std::string> out;
                               for (const auto& d : pm.model->model().env_decls) out.push_back(d.name);
                               return out;
                             })
      .def_property_readonly("class_names",
                             [](const PyModel& pm) {
                               std::vector<std::string> out;
                               for (const auto& c : pm.model->model().classes) out.push_back(c.name);
                               return out;
                             })
      .def("pretty", [](const PyModel& pm) { return pretty_print(pm.model->model()); })
      .def("emit_erlang", [](const PyModel& pm) {
        std::map<std::string, std::string> files;
        for (const auto& f : emit_erlang(*pm.model).files) files[f.name] = f.text;
        return files;
      });

  py::class_<Trace>(m, "Trace")
      .def_property_readonly("termination", [](const Trace& t) { return termination_reason_name(t.end.reason); })
      .def_property_readonly("covered_until", [](const Trace& t) { return t.end.covered_until; })
      .def_property_readonly("truncated", &Trace::truncated)
      .def_readonly("decisions", &Trace::decisions)
      .def("__len__", [](const Trace& t) { return t.events.size(); })
      .def("jsonl", [](const Trace& t) { return to_jsonl(t); });

  m.def(
      "run",
      [](const PyModel& pm, const Bindings& env, std::uint64_t seed, std::optional<std::int64_t> horizon,
         std::optional<std::uint64_t> max_steps, const std::string& deadline_check, bool fixed_order) {
        SchedulePolicy policy;
        policy.horizon = horizon_of(horizon);
        policy.max_steps = max_steps;
        policy.deadline_check = deadline_mode(deadline_check);
        if (fixed_order) policy.tie_break = TieBreak::FixedOrder;
        if (!policy.horizon && !policy.max_steps) throw py::value_error("set horizon or max_steps");
        auto ctx = context_of(pm, env);
        py::gil_scoped_release release;
        return run(ctx, seed, policy);
      },
      py::arg("model"), py::arg("env") = Bindings{}, py::arg("seed") = 0, py::arg("horizon") = py::none(),
      py::arg("max_steps") = py::none(), py::arg("deadline_check") = "literal", py::arg("fixed_order") = false);

  py::class_<PyGraph>(m, "Graph")
      .def_property_readonly("state_count", [](const PyGraph& g) { return g.result.states.size(); })
      .def_property_readonly("edge_count", [](const PyGraph& g) { return g.result.edges.size(); })
      .def_property_readonly("terminal_count", [](const PyGraph& g) { return g.result.terminal_count(); })
      .def_property_readonly("truncated", [](const PyGraph& g) { return g.result.truncated; })
      .def_property_readonly("state_limit_hit", [](const PyGraph& g) { return g.result.state_limit_hit; })
      .def("to_json", [](const PyGraph& g) { return to_json(g.result); })
      .def("to_dot", [](const PyGraph& g) { return to_dot(g.result); })
      .def(
          "replay",
          [](const PyGraph& g, const std::vector<StepDecisions>& path) {
            try {
              return replay(g.ctx, g.result, path);
            } catch (const std::invalid_argument& e) {
              throw py::value_error(e.what());
            }
          },
          py::arg("path"));

  m.def(
      "explore",
      [](const PyModel& pm, const Bindings& env, std::optional<std::int64_t> horizon,
         std::optional<std::uint64_t> max_steps, std::optional<std::size_t> max_states,
         const std::string& deadline_check, unsigned workers) {
        ExploreOptions opt;
        opt.bounds.horizon = horizon_of(horizon);
        opt.bounds.max_steps = max_steps;
        opt.bounds.max_states = max_states;
        opt.deadline_check = deadline_mode(deadline_check);
        opt.workers = workers == 0 ? 1 : workers;
        PyGraph g{context_of(pm, env), {}};
        py::gil_scoped_release release;
        g.result = explore(g.ctx, opt);
        return g;
      },
      py::arg("model"), py::arg("env") = Bindings{}, py::arg("horizon") = py::none(),
      py::arg("max_steps") = py::none(), py::arg("max_states") = py::none(), py::arg("deadline_check") = "literal",
      py::arg("workers") = 1);

  py::class_<MonitorSpec>(m, "Monitor")
      .def(py::init([](const std::string& text) { return parse_monitor(text); }), py::arg("text"))
      .def_property_readonly("clauses",
                             [](const MonitorSpec& s) {
                               std::vector<std::string> out;
                               for (const auto& c : s.clauses) out.push_back(c.text);
                               return out;
                             })
      .def("check_trace", [](const MonitorSpec& s, const Trace& t) { return verdict_names(check_trace(t, s)); })
      .def("check_graph", [](const MonitorSpec& s, const PyGraph& g) {
        auto v = check_graph(g.result, s);
        return std::map<std::string, std::vector<std::string>>{{"exists", verdict_names(v.exists)},
                                                                {"forall", verdict_names(v.forall)}};
      });
}
