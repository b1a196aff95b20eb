#pragma once

#include <stdexcept>
#include <string>

namespace avgbound {

/// A bound function or system callable was evaluated outside its domain
/// (r >= rho, an action outside Lambda, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class SingularMatrixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The supplied contraction window violates the fixed-point preconditions.
class ContractionViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad parameters or configuration (unknown preset, eps <= 0, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace avgbound
