#pragma once

#include <stdexcept>
#include <string>

namespace snowball {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Input data that cannot be used (CLI exit code 3).
class DataError : public Error {
public:
    using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public DataError {
public:
    using DataError::DataError;
};

/// The oracle was asked about a node it has never revealed.
class NodeNotDiscoverable : public Error {
public:
    explicit NodeNotDiscoverable(const std::string& node)
        : Error("node not discoverable: " + node) {}
};

/// Sampling step requested with an empty outsider set.
class FrontierExhausted : public Error {
public:
    FrontierExhausted() : Error("frontier exhausted") {}
};

} // namespace snowball
