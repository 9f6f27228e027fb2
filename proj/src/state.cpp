#include "trebeca/state.hpp"

#include <algorithm>
#include <cstring>

#include "trebeca/checked_model.hpp"

namespace trebeca {

std::string Value::debug_string() const {
  switch (kind_) {
    case ValueKind::Int: return std::to_string(bits_);
    case ValueKind::Bool: return bits_ ? "true" : "false";
    case ValueKind::Time: return "t" + std::to_string(bits_);
    case ValueKind::Rebec: {
      auto id = as_rebec();
      if (id == RebecId::external()) return "@external";
      if (id == RebecId::unbound()) return "@unbound";
      return "@" + std::to_string(id.value);
    }
  }
  return "?";
}

std::strong_ordering operator<=>(const Message& a, const Message& b) {
  if (auto c = a.tt <=> b.tt; c != 0) return c;
  if (auto c = a.receiver <=> b.receiver; c != 0) return c;
  if (auto c = a.method <=> b.method; c != 0) return c;
  if (auto c = std::lexicographical_compare_three_way(a.args.begin(), a.args.end(), b.args.begin(),
                                                      b.args.end());
      c != 0)
    return c;
  if (auto c = a.sender <=> b.sender; c != 0) return c;
  return a.dl <=> b.dl;
}

void SystemState::sort_bag() {
  if (!std::is_sorted(bag.begin(), bag.end())) {
    std::sort(bag.begin(), bag.end());
  }
}

namespace {

class KeyWriter {
 public:
  explicit KeyWriter(std::string& out) : out_(out) {}

  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void i64(std::int64_t v) { raw(&v, sizeof v); }
  void value(const Value& v) {
    out_.push_back(static_cast<char>(v.kind()));
    i64(v.bits());
  }
  void values(const std::vector<Value>& vs) {
    u32(static_cast<std::uint32_t>(vs.size()));
    for (const auto& v : vs) value(v);
  }

 private:
  void raw(const void* p, std::size_t n) {
    auto size = out_.size();
    out_.resize(size + n);
    std::memcpy(out_.data() + size, p, n);
  }
  std::string& out_;
};

}  // namespace

std::string state_key(const SystemState& state) {
  std::string key;
  key.reserve(64 + state.envs.size() * 48 + state.bag.size() * 56);
  KeyWriter w(key);
  w.u32(static_cast<std::uint32_t>(state.envs.size()));
  for (const auto& env : state.envs) {
    w.u32(env.class_index);
    w.i64(env.now.ticks());
    w.values(env.state_vars);
    w.values(env.known_rebecs);
  }

  auto write_message = [&](const Message& m) {
    w.i64(m.tt.ticks());
    w.u32(m.receiver.value);
    w.u32(m.method);
    w.values(m.args);
    w.u32(m.sender.value);
    w.i64(m.dl.is_infinite() ? -1 : m.dl.value().ticks());
  };
  w.u32(static_cast<std::uint32_t>(state.bag.size()));
  if (std::is_sorted(state.bag.begin(), state.bag.end())) {
    for (const auto& m : state.bag) write_message(m);
  } else {
    std::vector<const Message*> order;
    order.reserve(state.bag.size());
    for (const auto& m : state.bag) order.push_back(&m);
    std::sort(order.begin(), order.end(), [](const Message* a, const Message* b) { return *a < *b; });
    for (const auto* m : order) write_message(*m);
  }
  return key;
}

CheckedModel::CheckedModel(Model resolved) : model_(std::move(resolved)) {
  methods_.resize(model_.classes.size());
  for (std::uint32_t c = 0; c < model_.classes.size(); ++c) {
    classes_.emplace(model_.classes[c].name, c);
    for (std::uint32_t m = 0; m < model_.classes[c].methods.size(); ++m) {
      methods_[c].emplace(model_.classes[c].methods[m].name, m);
      method_names_.push_back(model_.classes[c].methods[m].name);
    }
  }
  std::sort(method_names_.begin(), method_names_.end());
  method_names_.erase(std::unique(method_names_.begin(), method_names_.end()), method_names_.end());
  for (std::uint32_t i = 0; i < model_.env_decls.size(); ++i) {
    envs_.emplace(model_.env_decls[i].name, i);
  }
  for (std::uint32_t i = 0; i < model_.main.size(); ++i) {
    instances_.emplace(model_.main[i].name, i);
  }
}

namespace {
template <typename Map>
std::optional<std::uint32_t> lookup(const Map& map, std::string_view name) {
  auto it = map.find(std::string(name));
  if (it == map.end()) return std::nullopt;
  return it->second;
}
}  // namespace

std::optional<std::uint32_t> CheckedModel::class_index(std::string_view name) const {
  return lookup(classes_, name);
}

std::optional<std::uint32_t> CheckedModel::method_index(std::uint32_t cls,
                                                        std::string_view name) const {
  if (cls >= methods_.size()) return std::nullopt;
  return lookup(methods_[cls], name);
}

std::optional<std::uint32_t> CheckedModel::env_index(std::string_view name) const {
  return lookup(envs_, name);
}

std::optional<std::uint32_t> CheckedModel::instance_index(std::string_view name) const {
  return lookup(instances_, name);
}

std::string CheckedModel::rebec_name(RebecId id, std::uint32_t cls) const {
  if (id == RebecId::external()) return "external";
  if (id == RebecId::unbound()) return "unbound";
  if (id.value < model_.main.size()) return model_.main[id.value].name;
  std::string cname = cls < model_.classes.size() ? model_.classes[cls].name : "rebec";
  return cname + "#" + std::to_string(id.value);
}

}  // namespace trebeca
