#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trebeca/time.hpp"
#include "trebeca/value.hpp"

namespace trebeca {

/// Bag element (receiver, method(args), sender, TT, DL). `method` indexes the
/// receiver's class; tt and dl are absolute.
struct Message {
  RebecId receiver;
  std::uint32_t method = 0;
  std::vector<Value> args;
  RebecId sender;
  TimeValue tt;
  Deadline dl;

  /// Canonical bag order: (tt, receiver, method, args, sender, dl).
  friend std::strong_ordering operator<=>(const Message& a, const Message& b);
  friend bool operator==(const Message& a, const Message& b) = default;
};

/// Private store of one rebec. `sender` and locals only exist while a method
/// runs and therefore live in the interpreter's frame, not here.
struct RebecEnv {
  RebecId id;
  std::uint32_t class_index = 0;
  TimeValue now;
  std::vector<Value> state_vars;    // declaration order
  std::vector<Value> known_rebecs;  // declaration order, RebecRef values

  RebecId self() const { return id; }

  friend bool operator==(const RebecEnv&, const RebecEnv&) = default;
};

/// (Env, B). `envs[i].id == i`; the next fresh id is `envs.size()`.
struct SystemState {
  std::vector<RebecEnv> envs;
  std::vector<Message> bag;  // kept in canonical order between steps

  RebecId next_fresh_id() const { return RebecId{static_cast<std::uint32_t>(envs.size())}; }
  RebecEnv& env(RebecId id) { return envs.at(id.value); }
  const RebecEnv& env(RebecId id) const { return envs.at(id.value); }

  void sort_bag();

  friend bool operator==(const SystemState&, const SystemState&) = default;
};

/// Canonical byte serialization: envs by id (state vars in declaration
/// order), then the sorted bag. Two states have equal keys iff they are
/// structurally equal.
std::string state_key(const SystemState& state);

}  // namespace trebeca
