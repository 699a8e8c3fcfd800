#pragma once

#include <stdexcept>
#include <string>

namespace ci_planner {

/// Input outside the mathematical domain of an operation (bad n, acc, k, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A method was asked for an inversion it does not support.
class UnsupportedMethodError : public DomainError {
public:
    using DomainError::DomainError;
};

/// The requested radius cannot be reached at any confidence for this n.
class UnattainableError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Root-finding target not bracketed by the search interval.
class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A function evaluation produced NaN or infinity.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ci_planner
