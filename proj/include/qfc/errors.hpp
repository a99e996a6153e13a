// Error types shared across the library. Precondition violations use
// std::invalid_argument; the types below mark distinct numerical outcomes.

#pragma once

#include <stdexcept>
#include <string>

namespace qfc {

// Channel success probability vanished (both arm efficiencies zero, or the
// input has no support on the conversion map).
struct DegenerateChannelError : std::runtime_error {
    explicit DegenerateChannelError(const std::string& what) : std::runtime_error(what) {}
};

// Tomography input lacks counts in at least one basis pair.
struct InsufficientDataError : std::runtime_error {
    explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

// Fringe fit design matrix is singular (angles aliased mod 90 degrees) or the
// angle set violates the fit contract.
struct IllPosedFitError : std::runtime_error {
    explicit IllPosedFitError(const std::string& what) : std::runtime_error(what) {}
};

// Fidelity budget arithmetic produced an impossible ledger (negative raw fidelity).
struct InconsistentBudgetError : std::runtime_error {
    explicit InconsistentBudgetError(const std::string& what) : std::runtime_error(what) {}
};

// More than 10% of bootstrap resamples failed to produce an estimate.
struct UnstableEstimateError : std::runtime_error {
    explicit UnstableEstimateError(const std::string& what) : std::runtime_error(what) {}
};

// Config parse or validation failure. Carries the line number when known.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_number(line) {}
    int line_number = 0;
};

} // namespace qfc
