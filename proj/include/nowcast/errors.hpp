#pragma once

#include <stdexcept>
#include <string>

namespace nowcast {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input (bad CSV row, bad event expression, bad date, ...).
struct ParseError : Error {
    using Error::Error;
};

// Input is well-formed but violates a value constraint.
struct ValidationError : Error {
    using Error::Error;
};

// Inconsistency between inputs and the election configuration.
struct ConfigError : Error {
    using Error::Error;
};

// No usable poll data for the requested date window.
struct NoDataError : Error {
    using Error::Error;
};

// Monte Carlo estimation cannot produce a result.
struct EstimationError : Error {
    using Error::Error;
};

// A simulated election in which no eligible party passes the threshold.
struct DegenerateDrawError : Error {
    using Error::Error;
};

}  // namespace nowcast
