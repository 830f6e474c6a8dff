#pragma once

#include <stdexcept>
#include <string>

namespace cogrel {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input text (bad JSON, unparseable numbers).
struct ParseError : Error {
    using Error::Error;
};

// Structurally valid input that does not match the wire schema
// (unknown enum values, missing or extra fields, wrong types).
struct SchemaError : Error {
    using Error::Error;
};

// A value violates a documented field invariant (negative time,
// confidence outside [0,1], illegal field combination).
struct InvariantError : Error {
    using Error::Error;
};

// Event-stream level violation: out-of-order timestamps, overlapping
// or interleaved episodes, recovery without a matching fault.
struct StreamError : Error {
    using Error::Error;
};

// A metric is requested on data for which it is undefined
// (zero episodes, zero MTBF).
struct UndefinedMetricError : Error {
    using Error::Error;
};

// Argument outside a function's mathematical domain.
struct DomainError : Error {
    using Error::Error;
};

// Invalid configuration value (weights that do not sum to 1, bad
// thresholds, malformed override files).
struct ConfigError : Error {
    using Error::Error;
};

// Filesystem failure (unreadable input, unwritable output).
struct IoError : Error {
    using Error::Error;
};

}  // namespace cogrel
