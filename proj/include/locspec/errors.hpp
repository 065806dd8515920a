#pragma once

#include <stdexcept>
#include <string>

namespace locspec {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (x outside the support, ell <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Input data that fails a construction-time invariant (non-Hermitian matrix, unsorted grid, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A caller broke a documented precondition between modules (e.g. mesh missing a breakpoint).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// The mass matrix is not positive definite or the pencil is otherwise unusable.
class PencilError : public Error {
public:
    using Error::Error;
};

/// LDL factorization met an exactly singular pivot at the requested shift.
class SingularShift : public Error {
public:
    explicit SingularShift(double sigma)
        : Error("singular factorization at shift " + std::to_string(sigma)), sigma_(sigma) {}
    double sigma() const noexcept { return sigma_; }

private:
    double sigma_;
};

/// An output file could not be written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Adaptive ODE integration could not make progress.
class IntegrationFailure : public Error {
public:
    IntegrationFailure(const std::string& what, double x) : Error(what), x_(x) {}
    double location() const noexcept { return x_; }

private:
    double x_;
};

}  // namespace locspec
