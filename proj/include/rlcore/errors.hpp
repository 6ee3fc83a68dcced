#pragma once

#include <stdexcept>
#include <string>

namespace rlcore {

/// Invalid argument value (out-of-space state/action, dimension mismatch, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation called in the wrong object state (step before reset, empty buffer, ...).
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Operation not defined for this variant (e.g. probabilities of a continuous policy).
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Bad experiment/CLI configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed snapshot bytes.
class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Snapshot produced by an incompatible format version.
class VersionError : public DecodeError {
public:
    using DecodeError::DecodeError;
};

/// Filesystem failure.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rlcore
