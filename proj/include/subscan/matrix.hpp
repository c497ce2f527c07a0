#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace subscan {

/// Dense M x N matrix of finite reals, row-major.
class DataMatrix {
public:
    DataMatrix() = default;

    /// Zero-filled matrix. Throws DimensionError if either extent is 0.
    DataMatrix(std::size_t rows, std::size_t cols);

    /// Takes ownership of row-major values; size must equal rows * cols and
    /// every value must be finite.
    DataMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    static DataMatrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return values_.size(); }

    double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const noexcept {
        return {values_.data() + i * cols_, cols_};
    }
    std::span<double> row(std::size_t i) noexcept { return {values_.data() + i * cols_, cols_}; }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    DataMatrix transposed() const;

    friend bool operator==(const DataMatrix&, const DataMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// A candidate submatrix: sorted, duplicate-free row and column index sets.
/// Indices are 0-based.
struct SubmatrixSupport {
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;

    /// Throws BoundsError unless both index sets are non-empty, strictly
    /// increasing and inside an M x N matrix.
    void validate(std::size_t M, std::size_t N) const;

    /// {0..m-1} x {0..n-1}
    static SubmatrixSupport leading(std::size_t m, std::size_t n);

    friend bool operator==(const SubmatrixSupport&, const SubmatrixSupport&) = default;
};

/// Whitespace/comma separated text, one matrix row per line; '#' starts a comment.
DataMatrix parse_matrix(const std::string& text);
std::string format_matrix(const DataMatrix& X);

}  // namespace subscan
