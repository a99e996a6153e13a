// Named experiment pipelines. Each run writes counts.csv, result.json and
// report.txt into the configured output directory and reports success through
// an exit status: 0 ok, 2 config validation failure, 3 numerical failure.
// Partial outputs are removed when a run fails.

#pragma once

#include <string>
#include <vector>

#include "qfc/config.hpp"

namespace qfc {

struct RunResult {
    int exit_code = 0;
    std::vector<std::string> files; // written files, absolute or as given
    std::string message;            // failure description when exit_code != 0
};

RunResult run_experiment(const RunConfig& cfg);

} // namespace qfc
