#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace trebeca {

class SweepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameter sweep description. Text format, one `key: value` per line,
/// `#` comments:
///
///   requestDeadline: [2]
///   checkIssuedPeriod: [1, 2]
///   serviceTime1: [3..4]
///   seeds: [1..10]
///   horizon: 50
///   mode: explore
///   monitor: issued.monitor
///
/// Keys other than the reserved ones below are env variables. Values are
/// integers, `true`/`false`, or `a..b` ranges inside lists.
struct SweepSpec {
  std::vector<std::pair<std::string, std::vector<std::int64_t>>> env;  // file order
  std::vector<std::uint64_t> seeds{0};
  std::optional<std::int64_t> horizon;
  std::optional<std::uint64_t> max_steps;
  std::optional<std::size_t> max_states;
  std::string mode = "run";          // run | explore
  std::string monitor;               // path, relative to the sweep file
  std::string quantifier = "forall"; // exists | forall; also picks the aggregation
  std::string deadline_check = "literal";

  std::size_t point_count() const;
  std::size_t run_count() const;
  /// Env binding of point `i` in odometer order (last key varies fastest).
  std::vector<std::pair<std::string, std::int64_t>> point(std::size_t i) const;
};

/// Throws SweepError with a line number on malformed input or when nothing
/// is swept.
SweepSpec parse_sweep(std::string_view text);

}  // namespace trebeca
