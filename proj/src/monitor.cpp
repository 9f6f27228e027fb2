#include "trebeca/monitor.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <deque>
#include <unordered_map>

namespace trebeca {

MonitorSyntaxError::MonitorSyntaxError(int line, int column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ":" + std::to_string(column) + ": " +
                         message),
      line_(line),
      column_(column) {}

namespace {

class LineParser {
 public:
  LineParser(std::string_view text, int line) : s_(text), line_(line) {}

  Clause parse() {
    Clause c;
    c.line = line_;
    std::string kw = word();
    if (kw == "EVENTUALLY") {
      c.kind = ClauseKind::Eventually;
      c.event = event();
    } else if (kw == "NEVER") {
      c.kind = ClauseKind::Never;
      c.event = event();
    } else if (kw == "ALWAYS-PRECEDES") {
      c.kind = ClauseKind::AlwaysPrecedes;
      expect('(');
      c.event = event();
      expect(',');
      c.later = event();
      expect(')');
    } else {
      fail("expected EVENTUALLY, NEVER or ALWAYS-PRECEDES, found '" + kw + "'");
    }
    skip();
    if (i_ < s_.size()) {
      std::string w = word();
      if (w != "WITHIN") fail("expected WITHIN or end of line, found '" + w + "'");
      skip();
      auto start = i_;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      std::int64_t t = 0;
      auto [p, ec] = std::from_chars(s_.data() + start, s_.data() + i_, t);
      if (start == i_ || ec != std::errc()) fail("expected a non-negative time bound after WITHIN");
      c.within = TimeValue::from(t);
      skip();
      if (i_ < s_.size()) fail("unexpected text after the time bound");
    }
    return c;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw MonitorSyntaxError(line_, static_cast<int>(i_) + 1, msg);
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  void expect(char ch) {
    skip();
    if (i_ >= s_.size() || s_[i_] != ch) fail(std::string("expected '") + ch + "'");
    ++i_;
  }
  static bool word_char(char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '*' ||
           ch == '#';
  }
  std::string word() {
    skip();
    auto start = i_;
    while (i_ < s_.size() && word_char(s_[i_])) ++i_;
    if (start == i_) fail("expected a word");
    return std::string(s_.substr(start, i_ - start));
  }
  EventPattern event() {
    EventPattern p;
    std::string kind = word();
    if (kind == "selected") {
      p.kind = ObservedKind::Selected;
    } else if (kind == "purged") {
      p.kind = ObservedKind::Purged;
    } else if (kind == "sent") {
      p.kind = ObservedKind::Sent;
    } else {
      fail("expected selected, purged or sent, found '" + kind + "'");
    }
    p.rebec = word();
    expect('.');
    p.method = word();
    return p;
  }

  std::string_view s_;
  std::size_t i_ = 0;
  int line_;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

MonitorSpec parse_monitor(std::string_view text) {
  MonitorSpec spec;
  int line = 0;
  while (!text.empty()) {
    ++line;
    auto nl = text.find('\n');
    auto raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (auto hash = raw.find('#'); hash != std::string_view::npos) {
      // `#` inside a rebec pattern (Class#3) is not a comment.
      auto before = raw.substr(0, hash);
      if (before.empty() || std::isspace(static_cast<unsigned char>(before.back()))) {
        raw = before;
      }
    }
    auto body = trim(raw);
    if (body.empty()) continue;
    Clause c = LineParser(body, line).parse();
    c.text = std::string(body);
    spec.clauses.push_back(std::move(c));
  }
  return spec;
}

std::vector<std::string> unknown_pattern_names(const MonitorSpec& spec, const CheckedModel& model) {
  std::vector<std::string> out;
  auto check = [&](const EventPattern& p) {
    if (p.rebec != "*" && !model.instance_index(p.rebec) && !model.class_index(p.rebec) &&
        p.rebec.find('#') == std::string::npos) {
      out.push_back(p.rebec);
    }
    const auto& names = model.method_names();
    if (p.method != "*" && !std::binary_search(names.begin(), names.end(), p.method)) {
      out.push_back(p.method);
    }
  };
  for (const auto& c : spec.clauses) {
    check(c.event);
    if (c.later) check(*c.later);
  }
  return out;
}

const char* verdict_name(VerdictValue v) {
  switch (v) {
    case VerdictValue::Pass: return "pass";
    case VerdictValue::Fail: return "fail";
    case VerdictValue::Inconclusive: return "inconclusive";
  }
  return "?";
}

VerdictValue Verdict::overall() const {
  VerdictValue v = VerdictValue::Pass;
  for (const auto& c : clauses) {
    if (c.value == VerdictValue::Fail) return VerdictValue::Fail;
    if (c.value == VerdictValue::Inconclusive) v = VerdictValue::Inconclusive;
  }
  return v;
}

ClauseMonitor::ClauseMonitor(const Clause& clause, const CheckedModel& model)
    : clause_(clause), model_(model) {}

bool ClauseMonitor::matches(const EventPattern& p, const TraceEvent& e) const {
  switch (p.kind) {
    case ObservedKind::Selected:
      if (e.kind != EventKind::MsgSelected) return false;
      break;
    case ObservedKind::Purged:
      if (e.kind != EventKind::MsgPurged) return false;
      break;
    case ObservedKind::Sent:
      if (e.kind != EventKind::MsgSent) return false;
      break;
  }
  if (clause_.within && e.time > *clause_.within) return false;
  if (p.method != "*" && (e.method == TraceEvent::kNoMethod ||
                          model_.method(e.rebec_class, e.method).name != p.method)) {
    return false;
  }
  if (p.rebec != "*" && model_.cls(e.rebec_class).name != p.rebec &&
      model_.rebec_name(e.rebec, e.rebec_class) != p.rebec) {
    return false;
  }
  return true;
}

std::uint8_t ClauseMonitor::step(std::uint8_t s, const TraceEvent& event) const {
  if (s != kInitial) return s;
  switch (clause_.kind) {
    case ClauseKind::Eventually:
    case ClauseKind::Never: return matches(clause_.event, event) ? 1 : 0;
    case ClauseKind::AlwaysPrecedes:
      if (matches(clause_.event, event)) return 1;
      if (matches(*clause_.later, event)) return 2;
      return 0;
  }
  return s;
}

std::optional<VerdictValue> ClauseMonitor::settled(std::uint8_t s) const {
  if (s == kInitial) return std::nullopt;
  switch (clause_.kind) {
    case ClauseKind::Eventually: return VerdictValue::Pass;
    case ClauseKind::Never: return VerdictValue::Fail;
    case ClauseKind::AlwaysPrecedes: return s == 1 ? VerdictValue::Pass : VerdictValue::Fail;
  }
  return std::nullopt;
}

VerdictValue ClauseMonitor::at_end(std::uint8_t s, const RunEnd& end) const {
  if (auto v = settled(s)) return *v;
  // Nothing matched. That is final only if the relevant window was fully
  // observed.
  bool covered = end.complete() || end.covered_until == RunEnd::kEverything ||
                 (clause_.within && clause_.within->ticks() <= end.covered_until);
  if (!covered) return VerdictValue::Inconclusive;
  return clause_.kind == ClauseKind::Eventually ? VerdictValue::Fail : VerdictValue::Pass;
}

Verdict check_trace(const Trace& trace, const MonitorSpec& spec) {
  Verdict v;
  for (const auto& clause : spec.clauses) {
    ClauseMonitor mon(clause, *trace.model);
    ClauseVerdict cv;
    std::uint8_t s = ClauseMonitor::kInitial;
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
      s = mon.step(s, trace.events[i]);
      if (auto settled = mon.settled(s)) {
        cv.value = *settled;
        cv.witness_event = i;
        break;
      }
    }
    if (!cv.witness_event) {
      cv.value = mon.at_end(s, trace.end);
      if (!trace.events.empty()) cv.witness_event = trace.events.size() - 1;
    }
    v.clauses.push_back(std::move(cv));
  }
  return v;
}

namespace {

struct ProductNode {
  StateId state;
  std::uint8_t mon;
  std::int64_t parent_edge = -1;  // graph edge id used to reach this node
  std::int64_t parent = -1;       // product node it was reached from
  std::vector<std::uint32_t> succ;
  std::optional<VerdictValue> leaf;
};

std::vector<std::uint32_t> path_to(const std::vector<ProductNode>& nodes, std::size_t n) {
  std::vector<std::uint32_t> path;
  for (auto at = static_cast<std::int64_t>(n); nodes[at].parent >= 0; at = nodes[at].parent) {
    path.push_back(static_cast<std::uint32_t>(nodes[at].parent_edge));
  }
  std::reverse(path.begin(), path.end());
  return path;
}

// Marks nodes that lie on a cycle (nontrivial SCC or self loop).
std::vector<bool> on_cycle(const std::vector<ProductNode>& nodes) {
  const auto n = nodes.size();
  std::vector<std::int64_t> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false), cyclic(n, false);
  std::vector<std::size_t> stack;
  std::int64_t counter = 0;
  struct Frame {
    std::size_t v;
    std::size_t next;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& f = call.back();
      if (f.next < nodes[f.v].succ.size()) {
        auto w = nodes[f.v].succ[f.next++];
        if (w == f.v) cyclic[w] = true;
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      auto v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        if (comp.size() > 1) {
          for (auto c : comp) cyclic[c] = true;
        }
      }
    }
  }
  return cyclic;
}

}  // namespace

GraphVerdict check_graph(const ExploreResult& result, const MonitorSpec& spec) {
  GraphVerdict gv;
  const auto& model = *result.model;
  for (const auto& clause : spec.clauses) {
    ClauseMonitor mon(clause, model);
    std::vector<ProductNode> nodes;
    std::unordered_map<std::uint64_t, std::uint32_t> ids;
    std::deque<std::uint32_t> queue;
    auto intern = [&](StateId s, std::uint8_t m, std::int64_t parent, std::int64_t edge) {
      auto key = (static_cast<std::uint64_t>(s) << 8) | m;
      auto [it, fresh] = ids.emplace(key, static_cast<std::uint32_t>(nodes.size()));
      if (fresh) {
        nodes.push_back(ProductNode{s, m, edge, parent, {}, {}});
        queue.push_back(it->second);
      }
      return it->second;
    };

    std::uint8_t m0 = ClauseMonitor::kInitial;
    for (const auto& e : result.initial_events) m0 = mon.step(m0, e);
    intern(result.initial, m0, -1, -1);
    while (!queue.empty()) {
      auto n = queue.front();
      queue.pop_front();
      auto state = nodes[n].state;
      auto m = nodes[n].mon;
      if (auto v = mon.settled(m)) {
        nodes[n].leaf = *v;
        continue;
      }
      const auto& info = result.states[state];
      if (info.terminal) {
        for (const auto& e : info.terminal_events) m = mon.step(m, e);
        nodes[n].leaf = mon.at_end(m, *info.terminal);
        continue;
      }
      for (auto eid : result.out_edges[state]) {
        const auto& edge = result.edges[eid];
        std::uint8_t mm = m;
        for (const auto& e : edge.events) mm = mon.step(mm, e);
        auto to = intern(edge.to, mm, n, eid);
        nodes[n].succ.push_back(to);
      }
    }

    auto cyclic = on_cycle(nodes);
    RunEnd forever{TerminationReason::None, RunEnd::kEverything};
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!nodes[i].leaf && cyclic[i]) nodes[i].leaf = mon.at_end(nodes[i].mon, forever);
    }

    // exists prefers pass, forall prefers fail; first found in BFS order wins.
    auto rank_exists = [](VerdictValue v) {
      return v == VerdictValue::Pass ? 0 : v == VerdictValue::Inconclusive ? 1 : 2;
    };
    auto rank_forall = [](VerdictValue v) {
      return v == VerdictValue::Fail ? 0 : v == VerdictValue::Inconclusive ? 1 : 2;
    };
    std::optional<std::size_t> best_exists, best_forall;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!nodes[i].leaf) continue;
      auto v = *nodes[i].leaf;
      if (!best_exists || rank_exists(v) < rank_exists(*nodes[*best_exists].leaf)) best_exists = i;
      if (!best_forall || rank_forall(v) < rank_forall(*nodes[*best_forall].leaf)) best_forall = i;
    }
    ClauseVerdict ex, fa;
    if (best_exists) {
      ex.value = *nodes[*best_exists].leaf;
      ex.witness_path = path_to(nodes, *best_exists);
    }
    if (best_forall) {
      fa.value = *nodes[*best_forall].leaf;
      fa.witness_path = path_to(nodes, *best_forall);
    }
    gv.exists.clauses.push_back(std::move(ex));
    gv.forall.clauses.push_back(std::move(fa));
  }
  return gv;
}

}  // namespace trebeca
