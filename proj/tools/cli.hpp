#pragma once

#include <iosfwd>

namespace geomseg {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;   // malformed input, unwritable output
inline constexpr int kExitDomain = 3;  // observation outside the model domain
inline constexpr int kExitFlags = 4;   // invalid flag or flag combination

/// Entry point of the `geomseg` tool; returns the process exit code.
/// Results go to `out` (unless --out is given), diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace geomseg
