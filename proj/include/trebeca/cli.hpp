#pragma once

#include <iosfwd>

namespace trebeca::cli {

// Process exit codes.
inline constexpr int kOk = 0;
inline constexpr int kModelError = 1;     // syntax/validation errors, bad monitor file
inline constexpr int kFail = 2;           // some monitor clause failed
inline constexpr int kInconclusive = 3;   // no failure, but something inconclusive
inline constexpr int kUnsupported = 4;    // construct outside the Erlang fragment
inline constexpr int kUsage = 64;         // bad arguments, unbound env variables
inline constexpr int kRuntimeError = 70;  // interpreter fault during a run
inline constexpr int kIoError = 74;

/// Entry point of the `trebeca` tool: check | run | explore | sweep | emit.
/// Data goes to `out` or to files, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace trebeca::cli
