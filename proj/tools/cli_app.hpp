#ifndef RCEXT_CLI_APP_HPP
#define RCEXT_CLI_APP_HPP

namespace rcext_cli {

// Exit codes, one per failure class:
//   0 success, 2 usage / bad arguments, 3 malformed file,
//   4 inconsistent inputs (index sets, shapes), 5 hard problem has no
//   solution, 6 solver divergence or other numerical failure.
enum ExitCode {
    kOk = 0,
    kUsage = 2,
    kBadFile = 3,
    kInconsistent = 4,
    kNoSolution = 5,
    kNumerical = 6,
};

int run_cli(int argc, const char* const* argv);

}  // namespace rcext_cli

#endif
