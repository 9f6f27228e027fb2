#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "trebeca/ast.hpp"
#include "trebeca/value.hpp"

namespace trebeca {

/// A parsed model whose names are resolved and whose static checks passed.
/// Immutable once built; share it as `std::shared_ptr<const CheckedModel>`.
class CheckedModel {
 public:
  explicit CheckedModel(Model resolved);

  const Model& model() const { return model_; }

  std::size_t class_count() const { return model_.classes.size(); }
  const ReactiveClassDef& cls(std::uint32_t index) const { return model_.classes[index]; }
  const MethodDef& method(std::uint32_t cls, std::uint32_t m) const {
    return model_.classes[cls].methods[m];
  }

  std::optional<std::uint32_t> class_index(std::string_view name) const;
  std::optional<std::uint32_t> method_index(std::uint32_t cls, std::string_view name) const;
  std::optional<std::uint32_t> initial_index(std::uint32_t cls) const {
    return method_index(cls, "initial");
  }
  std::optional<std::uint32_t> env_index(std::string_view name) const;
  std::optional<std::uint32_t> instance_index(std::string_view name) const;

  /// Main-block instance name for ids below the instance count, otherwise
  /// `Class#id` for rebecs created with `new`.
  std::string rebec_name(RebecId id, std::uint32_t cls) const;

  /// Every distinct method name, sorted; useful to validate monitor patterns.
  const std::vector<std::string>& method_names() const { return method_names_; }

 private:
  Model model_;
  std::unordered_map<std::string, std::uint32_t> classes_;
  std::vector<std::unordered_map<std::string, std::uint32_t>> methods_;
  std::unordered_map<std::string, std::uint32_t> envs_;
  std::unordered_map<std::string, std::uint32_t> instances_;
  std::vector<std::string> method_names_;
};

}  // namespace trebeca
