// Error hierarchy shared by all modules. Everything derives from std::runtime_error
// (or std::domain_error for argument-domain violations) so callers can catch broadly.
#pragma once

#include <stdexcept>
#include <string>

namespace pcosync {

// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// A bracketing/bisection routine could not certify its result.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Initial phase difference sits on the non-synchronizing fixed point.
struct NonSyncError : std::runtime_error {
    explicit NonSyncError(const std::string& what) : std::runtime_error(what) {}
};

// Reconciliation message violated the protocol contract.
struct ProtocolError : std::runtime_error {
    explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

// A theorem hypothesis required by an analysis does not hold for this configuration.
struct HypothesisError : std::runtime_error {
    explicit HypothesisError(const std::string& what) : std::runtime_error(what) {}
};

// Configuration file rejected; message carries the offending field path.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pcosync
