#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace charbvp {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data violates a documented invariant (dimensions, ranges, schema).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A derivative of higher order than the function supports was requested.
class UnsupportedOrderError : public Error {
public:
    UnsupportedOrderError(int requested, int available)
        : Error("derivative order " + std::to_string(requested) +
                " unavailable (max " + std::to_string(available) + ")"),
          requested_(requested),
          available_(available) {}

    int requested() const noexcept { return requested_; }
    int available() const noexcept { return available_; }

private:
    int requested_;
    int available_;
};

/// Evaluation produced a non-finite value (pole, log of zero, ...).
class DomainError : public Error {
public:
    DomainError(const std::string& what, double t)
        : Error(what + " at t=" + std::to_string(t)), t_(t) {}

    double where() const noexcept { return t_; }

private:
    double t_;
};

/// Expression text could not be parsed.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Integrator or quadrature failed to reach its target.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace charbvp
