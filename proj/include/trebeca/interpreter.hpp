#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "trebeca/checked_model.hpp"
#include "trebeca/state.hpp"
#include "trebeca/trace.hpp"

namespace trebeca {

/// Identifies a decision point. Nondeterministic choices use
/// (class, method, lexical index); scheduler ties use `tie()`.
struct ChoiceSite {
  std::uint32_t cls = 0;
  std::uint32_t method = 0;
  std::uint32_t index = 0;

  static constexpr ChoiceSite tie() { return ChoiceSite{0xFFFFFFFFu, 0xFFFFFFFFu, 0}; }
  constexpr bool is_tie() const { return cls == 0xFFFFFFFFu; }
};

/// Source of decisions. Implementations must return an index < arity.
class ChoiceResolver {
 public:
  virtual ~ChoiceResolver() = default;
  virtual std::uint32_t choose(const ChoiceSite& site, std::uint32_t arity) = 0;
};

/// Everything a run shares: the model and the bound env variables (indexed
/// like `model.env_decls`).
struct RunContext {
  std::shared_ptr<const CheckedModel> model;
  std::vector<Value> env;
};

/// Raised on evaluation faults; aborts the current method.
class RuntimeError : public std::runtime_error {
 public:
  RuntimeError(const std::string& message, std::string rebec, std::string method, SourcePos pos);

  const std::string& rebec() const { return rebec_; }
  const std::string& method() const { return method_; }
  SourcePos pos() const { return pos_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string detail_;
  std::string rebec_;
  std::string method_;
  SourcePos pos_;
};

/// Activation record of the executing method: self, sender and locals
/// (parameters first).
struct MethodFrame {
  RebecId self;
  RebecId sender = RebecId::external();
  std::uint32_t cls = 0;
  std::uint32_t method = 0;
  std::vector<Value> locals;
};

/// Effects of executing a statement: what was appended to the bag and to the
/// environment list, plus the observations emitted.
struct ExecEffects {
  std::vector<Message> sent;
  std::vector<RebecId> created;
  std::vector<TraceEvent> events;
};

Value eval_expr(const RunContext& ctx, const Expr& e, const MethodFrame& frame,
                const SystemState& state, ChoiceResolver& resolver);

/// Executes one statement of the frame's method. The executing rebec's store
/// is `state.env(frame.self)`; messages are appended to `state.bag` unsorted.
ExecEffects exec_stmt(const RunContext& ctx, const Stmt& s, MethodFrame& frame, SystemState& state,
                      ChoiceResolver& resolver);

/// Runs the method named by `msg` on its receiver to completion: now becomes
/// max(msg.tt, now), sender and parameters are bound, the body runs, and the
/// frame is discarded. The bag is left unsorted.
ExecEffects exec_method(const RunContext& ctx, const Message& msg, SystemState& state,
                        ChoiceResolver& resolver, std::uint64_t step = 0);

/// Default value for a declared type: 0, false, time 0, or an unbound ref.
Value default_value(const TypeRef& t);

}  // namespace trebeca
