#include "subscan/matrix.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "subscan/error.hpp"

namespace subscan {

DataMatrix::DataMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {
    if (rows == 0 || cols == 0) {
        throw DimensionError("data matrix must have at least one row and one column");
    }
}

DataMatrix::DataMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (rows == 0 || cols == 0) {
        throw DimensionError("data matrix must have at least one row and one column");
    }
    if (values_.size() != rows * cols) {
        throw DimensionError("value count " + std::to_string(values_.size()) + " does not match " +
                             std::to_string(rows) + "x" + std::to_string(cols));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw InvalidParameter("data matrix entries must be finite");
    }
}

DataMatrix DataMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw DimensionError("data matrix must have at least one row");
    const std::size_t cols = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * cols);
    for (const auto& r : rows) {
        if (r.size() != cols) throw DimensionError("ragged rows");
        values.insert(values.end(), r.begin(), r.end());
    }
    return DataMatrix(rows.size(), cols, std::move(values));
}

DataMatrix DataMatrix::transposed() const {
    DataMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    }
    return t;
}

namespace {

void validate_index_set(const std::vector<std::size_t>& idx, std::size_t extent, const char* what) {
    if (idx.empty()) throw BoundsError(std::string("empty ") + what + " index set");
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] >= extent) {
            throw BoundsError(std::string(what) + " index " + std::to_string(idx[k]) +
                              " out of range [0, " + std::to_string(extent) + ")");
        }
        if (k > 0 && idx[k] <= idx[k - 1]) {
            throw BoundsError(std::string(what) + " indices must be strictly increasing");
        }
    }
}

}  // namespace

void SubmatrixSupport::validate(std::size_t M, std::size_t N) const {
    validate_index_set(rows, M, "row");
    validate_index_set(cols, N, "column");
}

SubmatrixSupport SubmatrixSupport::leading(std::size_t m, std::size_t n) {
    SubmatrixSupport s;
    s.rows.resize(m);
    s.cols.resize(n);
    for (std::size_t i = 0; i < m; ++i) s.rows[i] = i;
    for (std::size_t j = 0; j < n; ++j) s.cols[j] = j;
    return s;
}

DataMatrix parse_matrix(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos < line.size()) {
            while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == ',' ||
                                         line[pos] == '\r')) {
                ++pos;
            }
            if (pos >= line.size()) break;
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + line.size(), v);
            if (ec != std::errc() || !std::isfinite(v)) {
                throw ParseError("expected a finite number near '" + line.substr(pos, 16) + "'", lineno);
            }
            pos = static_cast<std::size_t>(ptr - line.data());
            row.push_back(v);
        }
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError("row has " + std::to_string(row.size()) + " values, expected " +
                                 std::to_string(rows.front().size()),
                             lineno);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("no matrix rows found");
    return DataMatrix::from_rows(rows);
}

std::string format_matrix(const DataMatrix& X) {
    std::string out;
    char buf[32];
    for (std::size_t i = 0; i < X.rows(); ++i) {
        for (std::size_t j = 0; j < X.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", X(i, j));
            if (j > 0) out += ',';
            out += buf;
        }
        out += '\n';
    }
    return out;
}

}  // namespace subscan
