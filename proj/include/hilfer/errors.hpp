#pragma once

#include <stdexcept>
#include <string>

namespace hilfer {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Argument inside the domain but beyond what the evaluation method can be trusted with.
class RangeError : public Error {
public:
    using Error::Error;
};

/// An iterative or series method ran out of its term/iteration budget.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_update)
        : Error(what), last_update_(last_update) {}
    explicit ConvergenceError(const std::string& what) : ConvergenceError(what, 0.0) {}

    double last_update() const noexcept { return last_update_; }

private:
    double last_update_;
};

/// Caller violated a precondition that ties several objects together
/// (mesh mismatch, wrong weight exponent, invalid policy).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Mesh too coarse for the requested discrete operator.
class DiscretizationError : public Error {
public:
    using Error::Error;
};

/// Contraction ratio >= 1: the sufficient condition does not hold.
class CertificationError : public Error {
public:
    CertificationError(const std::string& what, double ratio) : Error(what), ratio_(ratio) {}
    double ratio() const noexcept { return ratio_; }

private:
    double ratio_;
};

}  // namespace hilfer
