#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace biasamp {

// Error taxonomy. The CLI maps each family onto a distinct exit code:
// ConfigError/ArgumentError -> 2, DataError -> 3, NumericError -> 4.

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller supplied an invalid argument (bad size, non-unit vector, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Value outside the support of a density.
class DomainError : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

/// Data has no spread to fit (all-equal values, single effective point).
class DegenerateDataError : public DataError {
public:
    using DataError::DataError;
};

/// Regressor with zero variance, or a singular design matrix.
class DegenerateRegressorError : public DataError {
public:
    using DataError::DataError;
};

/// Aggregation requested over an empty group.
class NoDataError : public DataError {
public:
    using DataError::DataError;
};

/// Malformed input file. Row and column are 1-based; 0 means "not applicable".
class SchemaError : public DataError {
public:
    SchemaError(const std::string& what, std::size_t row, std::size_t column)
        : DataError(what), row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

class NumericError : public Error {
public:
    using Error::Error;
};

/// Optimizer did not meet its tolerances within the iteration budget.
class ConvergenceError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Bias projection coefficient requested with a zero biased component.
class UndefinedCoefficientError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace biasamp
