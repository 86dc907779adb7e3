#pragma once

#include <stdexcept>
#include <string>

namespace greenmesh {

/// Input outside the mathematical or physical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed structured input (spectra, records, manifests).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scenario or profile configuration rejected during validation.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unrecoverable persistence failure.
class StorageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation's precondition on available data is not met yet
/// (open day, no closed days, ...).
class NotReadyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RoutingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace greenmesh
