#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace trebeca {

class TimeOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Logical time in non-negative integer ticks. Addition throws TimeOverflow
/// instead of wrapping.
class TimeValue {
 public:
  constexpr TimeValue() = default;

  static TimeValue from(std::int64_t ticks) {
    if (ticks < 0) {
      throw std::invalid_argument("negative time value: " + std::to_string(ticks));
    }
    return TimeValue(ticks);
  }

  static constexpr TimeValue zero() { return TimeValue(0); }
  static constexpr TimeValue max() {
    return TimeValue(std::numeric_limits<std::int64_t>::max());
  }

  constexpr std::int64_t ticks() const { return ticks_; }

  TimeValue plus(std::int64_t offset) const {
    if (offset < 0) {
      throw std::invalid_argument("negative time offset: " + std::to_string(offset));
    }
    if (ticks_ > std::numeric_limits<std::int64_t>::max() - offset) {
      throw TimeOverflow("time overflow: " + std::to_string(ticks_) + " + " +
                         std::to_string(offset));
    }
    return TimeValue(ticks_ + offset);
  }

  friend constexpr auto operator<=>(TimeValue, TimeValue) = default;

 private:
  constexpr explicit TimeValue(std::int64_t t) : ticks_(t) {}
  std::int64_t ticks_ = 0;
};

constexpr TimeValue max(TimeValue a, TimeValue b) { return a < b ? b : a; }

/// Absolute message deadline; Infinite sorts after every finite value.
class Deadline {
 public:
  constexpr Deadline() = default;  // infinite
  static constexpr Deadline infinite() { return Deadline(); }
  static constexpr Deadline finite(TimeValue t) { return Deadline(t); }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr TimeValue value() const { return value_; }

  friend constexpr bool operator==(const Deadline&, const Deadline&) = default;
  friend constexpr std::strong_ordering operator<=>(const Deadline& a, const Deadline& b) {
    if (a.infinite_ || b.infinite_) {
      return a.infinite_ == b.infinite_ ? std::strong_ordering::equal
             : a.infinite_              ? std::strong_ordering::greater
                                        : std::strong_ordering::less;
    }
    return a.value_ <=> b.value_;
  }

  /// t <= deadline
  constexpr bool admits(TimeValue t) const { return infinite_ || t <= value_; }

  std::string to_string() const {
    return infinite_ ? "inf" : std::to_string(value_.ticks());
  }

 private:
  constexpr explicit Deadline(TimeValue t) : infinite_(false), value_(t) {}
  bool infinite_ = true;
  TimeValue value_{};
};

}  // namespace trebeca
