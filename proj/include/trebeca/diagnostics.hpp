#pragma once

#include <string>
#include <vector>

#include "trebeca/ast.hpp"

namespace trebeca {

enum class Severity { Error, Warning };

struct ParseError {
  SourcePos pos;
  std::string message;
  Severity severity = Severity::Error;
};

using Diagnostics = std::vector<ParseError>;

bool has_errors(const Diagnostics& diags);

/// `file:line:col: severity: message`
std::string format_diagnostic(const std::string& file, const ParseError& d);

}  // namespace trebeca
