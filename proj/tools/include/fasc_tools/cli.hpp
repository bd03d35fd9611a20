#pragma once

#include <ostream>

namespace fasc::cli {

// Entry point shared by the executable and the tests. Returns the process
// exit code: 0 success, 2 configuration error, 3 I/O or input error,
// 4 internal invariant violation.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fasc::cli
