#pragma once

#include <stdexcept>
#include <string>

namespace decpomdp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An index fell outside the declared cardinality of an axis.
class IndexError : public Error {
public:
    IndexError(const std::string& axis, std::size_t index, std::size_t size)
        : Error("index " + std::to_string(index) + " out of range for axis '" + axis +
                "' (size " + std::to_string(size) + ")"),
          axis_(axis) {}
    const std::string& axis() const noexcept { return axis_; }

private:
    std::string axis_;
};

/// Table or object shapes that do not agree with each other.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid scenario or solver configuration; the message names the field.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Product variables that do not factor as x * y.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Non-finite numbers where probabilities or rewards are expected.
class DataError : public Error {
public:
    using Error::Error;
};

/// Exhaustive search refused because the candidate count exceeds the guard.
class GuardError : public Error {
public:
    GuardError(double cardinality, double limit)
        : Error("search space of " + std::to_string(static_cast<long double>(cardinality)) +
                " candidates exceeds guard of " + std::to_string(static_cast<long double>(limit))),
          cardinality_(cardinality) {}
    double cardinality() const noexcept { return cardinality_; }

private:
    double cardinality_;
};

/// Malformed or unreadable files.
class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace decpomdp
