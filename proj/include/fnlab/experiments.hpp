#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fnlab/config.hpp"

namespace fnlab {

struct RunOverrides {
    std::string out_dir;      ///< empty = config value
    int threads = 0;          ///< 0 = config value
    std::uint64_t seed = 0;   ///< 0 = config value
};

struct RunResult {
    int exit_code = 0;  ///< 0 pass, 1 verification failure, 2 bad input, 3 non-convergence
    std::vector<std::string> summary;
};

/// Executes the requested experiments, writes solution.csv / report.csv /
/// summary.txt into the output directory, and returns the exit status.
RunResult run_experiments(const ExperimentConfig& cfg, const RunOverrides& ovr = {});

/// Bundled suite configs in a directory: (filename, one-line description).
std::vector<std::pair<std::string, std::string>> list_suites(const std::string& dir);

/// Default suites directory: $FNLAB_SUITES_DIR, else <exe dir>/suites, else ./suites.
std::string default_suites_dir(const std::string& argv0);

} // namespace fnlab
