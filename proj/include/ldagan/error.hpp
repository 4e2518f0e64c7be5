#pragma once

#include <stdexcept>
#include <string>

namespace ldagan {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Malformed input document (checkpoint, config, CSV). The message carries
// the field path where parsing stopped.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class VersionError : public ParseError {
public:
    using ParseError::ParseError;
};

// Schema violation in a training configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File could not be opened, read, or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Training produced a non-finite loss or parameter.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ldagan
