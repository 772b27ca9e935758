#pragma once

#include <stdexcept>
#include <string>

namespace pfb {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad or missing configuration: invalid instances handed to a solver, missing
// due dates / weights for an objective that needs them, malformed JSON.
struct ConfigError : Error {
    using Error::Error;
};

// A documented precondition was violated (non-ERD order, infeasible input
// schedule, nonzero release dates for the late-jobs solver, ...).
struct PreconditionError : Error {
    using Error::Error;
};

// A schedule does not structurally match its instance (jobs missing from a
// machine, duplicated, out of range, empty batches).
struct StructureError : Error {
    using Error::Error;
};

// An explicit enumeration cap or memory cap was exceeded. The message names
// the cap that fired.
struct ResourceLimitError : Error {
    using Error::Error;
};

// Strict-mode solve of an objective/release-date combination for which no
// job ordering is certified optimal.
struct NoCertifiedOrderError : Error {
    using Error::Error;
};

}  // namespace pfb
