#pragma once

#include <stdexcept>
#include <string>

namespace cgl {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A site or query outside the region where the operation is defined.
struct DomainError : Error {
    using Error::Error;
};

// Malformed input data; `index` is the first offending position (1-based
// where the interface convention is 1-based, otherwise as documented).
struct ValidationError : Error {
    long long index;
    ValidationError(const std::string& what, long long idx) : Error(what), index(idx) {}
};

// A scalar parameter outside its admissible range.
struct ParameterError : Error {
    using Error::Error;
};

// Input does not cover the region an operation needs; message names the
// first uncovered site.
struct CoverageError : Error {
    using Error::Error;
};

// Allocation would exceed the configured memory budget.
struct ResourceError : Error {
    using Error::Error;
};

// A time query beyond what the computed data can answer.
struct HorizonError : Error {
    using Error::Error;
};

// A space-time query leaving the simulated window.
struct WindowError : Error {
    using Error::Error;
};

// Command line / config misuse.
struct UsageError : Error {
    using Error::Error;
};

// The growth table and the exclusion process disagree; a test failure surface.
struct CouplingViolation : Error {
    using Error::Error;
};

} // namespace cgl
