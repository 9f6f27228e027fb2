#pragma once

#include <memory>
#include <optional>
#include <string_view>

#include "trebeca/checked_model.hpp"
#include "trebeca/diagnostics.hpp"

namespace trebeca {

struct ParseResult {
  std::optional<Model> model;  // empty when any error was reported
  Diagnostics diagnostics;
};

/// Parses `.rebeca` source. Stops at the first syntax error.
ParseResult parse_model(std::string_view source);

struct CheckResult {
  std::shared_ptr<const CheckedModel> model;  // null when any error was reported
  Diagnostics diagnostics;                    // errors and warnings
};

/// Resolves names, checks arities and types, and annotates the tree.
CheckResult validate_model(Model model);

/// parse_model followed by validate_model; diagnostics from both stages.
CheckResult load_model(std::string_view source);

}  // namespace trebeca
