#include "trebeca/sweep.hpp"

#include <cctype>
#include <charconv>

namespace trebeca {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw SweepError("sweep line " + std::to_string(line) + ": " + msg);
}

std::int64_t integer(std::string_view s, int line) {
  s = trim(s);
  if (s == "true") return 1;
  if (s == "false") return 0;
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    fail(line, "expected an integer, found '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::int64_t> values(std::string_view s, int line) {
  s = trim(s);
  std::vector<std::int64_t> out;
  if (s.empty()) fail(line, "missing value");
  if (s.front() != '[') {
    out.push_back(integer(s, line));
    return out;
  }
  if (s.back() != ']') fail(line, "unterminated list");
  s = s.substr(1, s.size() - 2);
  while (!trim(s).empty()) {
    auto comma = s.find(',');
    auto item = trim(s.substr(0, comma));
    s = comma == std::string_view::npos ? std::string_view{} : s.substr(comma + 1);
    if (auto dots = item.find(".."); dots != std::string_view::npos) {
      auto lo = integer(item.substr(0, dots), line);
      auto hi = integer(item.substr(dots + 2), line);
      if (hi < lo) fail(line, "empty range");
      if (hi - lo > 1000000) fail(line, "range too large");
      for (auto v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(integer(item, line));
    }
  }
  if (out.empty()) fail(line, "empty list");
  return out;
}

std::int64_t single(std::string_view s, int line, const std::string& key) {
  auto vs = values(s, line);
  if (vs.size() != 1) fail(line, "'" + key + "' takes one value");
  return vs.front();
}

}  // namespace

std::size_t SweepSpec::point_count() const {
  std::size_t n = 1;
  for (const auto& [k, vs] : env) n *= vs.size();
  return n;
}

std::size_t SweepSpec::run_count() const {
  return point_count() * (mode == "explore" ? 1 : seeds.size());
}

std::vector<std::pair<std::string, std::int64_t>> SweepSpec::point(std::size_t i) const {
  std::vector<std::pair<std::string, std::int64_t>> out(env.size());
  for (std::size_t k = env.size(); k-- > 0;) {
    const auto& vs = env[k].second;
    out[k] = {env[k].first, vs[i % vs.size()]};
    i /= vs.size();
  }
  return out;
}

SweepSpec parse_sweep(std::string_view text) {
  SweepSpec spec;
  int line = 0;
  bool any = false;
  while (!text.empty()) {
    ++line;
    auto nl = text.find('\n');
    auto raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (raw.empty()) continue;
    auto colon = raw.find(':');
    if (colon == std::string_view::npos) fail(line, "expected 'key: value'");
    std::string key(trim(raw.substr(0, colon)));
    auto value = trim(raw.substr(colon + 1));
    if (key.empty()) fail(line, "missing key");
    any = true;
    if (key == "seeds") {
      spec.seeds.clear();
      for (auto v : values(value, line)) {
        if (v < 0) fail(line, "seeds must be non-negative");
        spec.seeds.push_back(static_cast<std::uint64_t>(v));
      }
    } else if (key == "horizon") {
      spec.horizon = single(value, line, key);
      if (*spec.horizon < 0) fail(line, "horizon must be non-negative");
    } else if (key == "max-steps") {
      auto v = single(value, line, key);
      if (v < 0) fail(line, "max-steps must be non-negative");
      spec.max_steps = static_cast<std::uint64_t>(v);
    } else if (key == "max-states") {
      auto v = single(value, line, key);
      if (v <= 0) fail(line, "max-states must be positive");
      spec.max_states = static_cast<std::size_t>(v);
    } else if (key == "mode") {
      spec.mode = std::string(value);
      if (spec.mode != "run" && spec.mode != "explore") fail(line, "mode must be run or explore");
    } else if (key == "monitor") {
      spec.monitor = std::string(value);
    } else if (key == "quantifier") {
      spec.quantifier = std::string(value);
      if (spec.quantifier != "exists" && spec.quantifier != "forall") {
        fail(line, "quantifier must be exists or forall");
      }
    } else if (key == "deadline-check") {
      spec.deadline_check = std::string(value);
      if (spec.deadline_check != "literal" && spec.deadline_check != "effective") {
        fail(line, "deadline-check must be literal or effective");
      }
    } else {
      for (const auto& [k, vs] : spec.env) {
        if (k == key) fail(line, "duplicate key '" + key + "'");
      }
      spec.env.emplace_back(key, values(value, line));
    }
  }
  if (!any) throw SweepError("sweep file is empty");
  return spec;
}

}  // namespace trebeca
