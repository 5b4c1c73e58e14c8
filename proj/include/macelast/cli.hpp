#pragma once

#include "macelast/mms.hpp"
#include "macelast/solve.hpp"
#include "macelast/tables.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace macelast::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kSolverFailure = 2, kCompareFailure = 3 };

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ReferenceCheck {
    std::string reference;  // embedded table name or CSV path
    CompareOptions options;
};

struct StudyConfig {
    std::string name;
    std::string case_name;
    double lambda = 0.0;
    double mu = 1.0;
    std::size_t base_cells = 8;
    int levels = 1;
    MeshMode mesh;
    SolverOptions solver;
    std::vector<ReferenceCheck> compare;
};

struct RunConfig {
    std::string output_dir = "results";
    int threads = 1;
    std::vector<StudyConfig> studies;
};

/// JSON document, see README for the keys and their defaults. Throws ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Thread count from MACELAST_THREADS when set, otherwise `fallback`.
/// Throws ConfigError for a value that is not a positive integer.
int thread_override(int fallback);

/// Runs every study, writes <name>.csv, <name>_interpolant.csv, <name>.md and
/// <name>_compare_<reference>.csv into the output directory and returns
/// the exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err, bool verbose = false);

/// Command line entry point: `run <config>` and `compare <produced> <reference>`.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace macelast::cli
