#pragma once

#include <stdexcept>
#include <string>

namespace mulsemi {

/// Base class for every error raised by the library. Carries the module and
/// operation that failed so front ends can report them.
class Error : public std::runtime_error {
public:
    Error(std::string module, std::string operation, const std::string& what)
        : std::runtime_error(module + "::" + operation + ": " + what),
          module_(std::move(module)),
          operation_(std::move(operation)) {}

    const std::string& module() const noexcept { return module_; }
    const std::string& operation() const noexcept { return operation_; }

private:
    std::string module_;
    std::string operation_;
};

/// Mismatched lengths, dimensions or spaces.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A parameter outside its mathematical domain (p < 1, t < 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Every cell of the measure space has zero weight.
class DegenerateSpaceError : public Error {
public:
    using Error::Error;
};

/// NaN/Inf entries or non-square input.
class InvalidMatrixError : public Error {
public:
    using Error::Error;
};

/// An iterative kernel did not converge.
class NumericalFailure : public Error {
public:
    NumericalFailure(std::string module, std::string operation, const std::string& what,
                     long iterations)
        : Error(std::move(module), std::move(operation),
                what + " (after " + std::to_string(iterations) + " iterations)"),
          iterations_(iterations) {}

    long iterations() const noexcept { return iterations_; }

private:
    long iterations_;
};

/// Closed-form Cesaro mean requested for a (numerically) singular generator.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Defective eigenvalue on the imaginary axis (or at zero): the semigroup is
/// unbounded and Cesaro means do not converge.
class UnboundedSemigroupError : public Error {
public:
    using Error::Error;
};

}  // namespace mulsemi
