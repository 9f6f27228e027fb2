#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "trebeca/checked_model.hpp"

namespace trebeca {

struct EmittedFile {
  std::string name;  // e.g. "agent.erl"
  std::string text;
};

/// One unit per reactive class, the runtime support unit and the bootstrap.
struct EmittedProgram {
  std::vector<EmittedFile> files;
};

class UnsupportedFeature : public std::runtime_error {
 public:
  UnsupportedFeature(SourcePos pos, const std::string& what);
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

/// Translates a model without rebec creation into Erlang source. Each class
/// becomes a process with three behaviour functions (await known rebecs,
/// serve `initial`, serve loop); message servers become receive clauses.
/// Throws UnsupportedFeature for `new`.
EmittedProgram emit_erlang(const CheckedModel& model);

/// Writes every file into `dir` (created if missing). Throws
/// std::filesystem::filesystem_error or std::ios_base::failure on I/O errors.
void write_program(const EmittedProgram& program, const std::filesystem::path& dir);

/// Lightweight re-scan used by tests: balanced (), {}, [] outside strings and
/// `fun ... end` / `receive ... end` / `case ... end` / `if ... end` keyword pairs.
bool balanced_delimiters(const std::string& text);

}  // namespace trebeca
