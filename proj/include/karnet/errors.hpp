#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace karnet {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration (bad layer spec, k > m, unknown activation, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Non-finite values, SVD failure, or divergence during training.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, long index = -1)
        : Error(what), index_(index) {}

    /// Layer or iteration index the failure refers to; -1 when not applicable.
    long index() const noexcept { return index_; }

private:
    long index_;
};

/// Every singular value of a matrix fell below the pseudoinverse cutoff.
class RankDeficiencyError : public NumericalError {
public:
    RankDeficiencyError(const std::string& what, long layer)
        : NumericalError(what, layer) {}
};

/// Dataset ingestion and encoding failures.
class DataError : public Error {
public:
    enum class Kind {
        missing_file,
        empty_file,
        ragged_row,
        non_numeric,
        missing_value,
        bad_label,
    };

    /// `row` and `column` are 1-based file coordinates; 0 means "not applicable".
    DataError(Kind kind, const std::string& what, std::size_t row = 0, std::size_t column = 0)
        : Error(what), kind_(kind), row_(row), column_(column) {}

    Kind kind() const noexcept { return kind_; }
    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    Kind kind_;
    std::size_t row_;
    std::size_t column_;
};

} // namespace karnet
