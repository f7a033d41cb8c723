#ifndef GAUSSDIV_CLI_HPP
#define GAUSSDIV_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gaussdiv::cli {

enum ExitCode : int {
    kOk = 0,
    kBadInput = 1,
    kUnphysical = 2,
    kNumericalFailure = 3,
};

struct RunConfig {
    std::string command;
    std::string input;
    int grid = 400;
    double tol = 1e-9;
    double margin = 1e-6;
    double tau = 1e-4;
    double fd_step = 1e-4;
    std::uint64_t seed = 0;
    std::string format; ///< csv | json; empty selects the command default
    std::string out;    ///< empty writes to the output stream
    unsigned threads = 1;
};

/// Parse `args` (without the program name) and run one command.
/// Reports go to `out` unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err);

/// GAUSSDIV_THREADS, 0 or unset meaning hardware concurrency.
unsigned threads_from_env();

} // namespace gaussdiv::cli

#endif // GAUSSDIV_CLI_HPP
