#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cyclesynth {

inline constexpr int kExitOptimal = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitSubOptimal = 2;

/// Runs the command line `args` (args[0] is the program name). Exit codes:
/// 0 optimal or success, 2 sub-optimal synthesis, 1 any error.
int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cyclesynth
