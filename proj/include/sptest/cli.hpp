#pragma once

#include <iosfwd>

namespace sptest {

/// Entry point behind the `sptest` executable. Returns the process exit code:
/// 0 on completion, the CLI11 code for usage errors, 2 for pipeline errors (reported as a
/// JSON object on `err`).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sptest
