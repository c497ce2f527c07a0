#pragma once

#include <stdexcept>
#include <string>

namespace subscan {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A scalar argument is outside its domain (non-finite tilt, k = 0, ...).
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// Requested submatrix size does not fit the data matrix.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An index set refers outside the data matrix.
class BoundsError : public Error {
public:
    using Error::Error;
};

/// An exhaustive computation would exceed its configured budget.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

/// Input could not be parsed; carries the offending 1-based line when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    explicit ParseError(const std::string& what) : Error(what), line_(0) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace subscan
