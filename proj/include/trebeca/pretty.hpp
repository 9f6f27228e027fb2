#pragma once

#include <string>

#include "trebeca/ast.hpp"

namespace trebeca {

/// Canonical source text. Re-parsing the output yields a structurally equal
/// model.
std::string pretty_print(const Model& model);
std::string pretty_print(const Expr& expr);

}  // namespace trebeca
