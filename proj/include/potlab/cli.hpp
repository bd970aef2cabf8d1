#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace potlab {

// Runs one command line (without the program name). Exit status: 0 success, 1 invalid input or
// NaN, 2 a verification suite failed.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace potlab
