#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include "trebeca/time.hpp"

namespace trebeca {

/// Rebec identity. Ids are handed out in creation order starting at 0 (main
/// block instances first).
struct RebecId {
  std::uint32_t value = 0;

  static constexpr RebecId external() { return RebecId{0xFFFFFFFFu}; }
  static constexpr RebecId unbound() { return RebecId{0xFFFFFFFEu}; }
  constexpr bool is_live() const { return value < 0xFFFFFFFEu; }

  friend constexpr auto operator<=>(RebecId, RebecId) = default;
};

enum class ValueKind : std::uint8_t { Int, Bool, Time, Rebec };

/// Runtime value: IntV | BoolV | TimeV | RebecRef.
class Value {
 public:
  constexpr Value() = default;

  static constexpr Value integer(std::int64_t v) { return Value(ValueKind::Int, v); }
  static constexpr Value boolean(bool v) { return Value(ValueKind::Bool, v ? 1 : 0); }
  static Value time(TimeValue t) { return Value(ValueKind::Time, t.ticks()); }
  static constexpr Value rebec(RebecId id) { return Value(ValueKind::Rebec, id.value); }

  constexpr ValueKind kind() const { return kind_; }
  constexpr bool is_numeric() const {
    return kind_ == ValueKind::Int || kind_ == ValueKind::Time;
  }

  /// Int or Time payload.
  constexpr std::int64_t as_int() const { return bits_; }
  constexpr bool as_bool() const { return bits_ != 0; }
  TimeValue as_time() const { return TimeValue::from(bits_); }
  constexpr RebecId as_rebec() const { return RebecId{static_cast<std::uint32_t>(bits_)}; }

  /// Raw payload, used for canonical serialization.
  constexpr std::int64_t bits() const { return bits_; }

  friend constexpr auto operator<=>(const Value&, const Value&) = default;

  std::string debug_string() const;

 private:
  constexpr Value(ValueKind k, std::int64_t b) : kind_(k), bits_(b) {}
  ValueKind kind_ = ValueKind::Int;
  std::int64_t bits_ = 0;
};

}  // namespace trebeca
