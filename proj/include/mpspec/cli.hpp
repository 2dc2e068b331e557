#pragma once

#include <iosfwd>

namespace mpspec {

/// Exit codes: 0 success, 2 invalid input, 3 numerical refusal.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mpspec
