#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace multisync::cli {

/// Exit-code contract: 0 positive verdict, 1 negative verdict, 2 input
/// error, 3 hypothesis violation, 4 numerical divergence.
constexpr int kExitSatisfied = 0;
constexpr int kExitUnsatisfied = 1;
constexpr int kExitInputError = 2;
constexpr int kExitHypothesis = 3;
constexpr int kExitDivergence = 4;

/// Runs one CLI invocation (args excludes the program name). All file
/// outputs land in the --out directory; nothing is written when validation
/// fails. MULTISYNC_THREADS caps internal parallelism.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace multisync::cli
