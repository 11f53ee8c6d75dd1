#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace itb {

/// Exit codes: 0 success, 1 bad command line, 2 invalid scenario or input,
/// 3 numerical failure (the failing check is named on err).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace itb
