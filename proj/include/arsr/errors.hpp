#ifndef ARSR_ERRORS_HPP
#define ARSR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace arsr {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Tensor/weight dimension mismatch. Messages carry both shapes.
class ShapeError : public Error {
public:
    using Error::Error;
};

// API precondition violated (wrong weight form, invalid plan, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

// Bad values in otherwise well-shaped data (NaN/Inf, mismatched pairs).
class DataError : public Error {
public:
    using Error::Error;
};

// Malformed or unsupported file contents.
class FormatError : public Error {
public:
    using Error::Error;
};

// Filesystem / stream / environment failures.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace arsr

#endif
