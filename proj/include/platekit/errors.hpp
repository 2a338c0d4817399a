#pragma once

#include <stdexcept>
#include <string>

namespace platekit {

// Error taxonomy mirrored by the CLI exit codes: config 2, data 3, validation 4.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad or inconsistent run configuration (unknown key, out-of-range option).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Unreadable, malformed or inconsistent input data (files, manifests, masks).
class DataError : public Error {
public:
    using Error::Error;
};

// Violated value invariants (degenerate boxes, out-of-bounds coordinates).
class ValidationError : public Error {
public:
    using Error::Error;
};

} // namespace platekit
