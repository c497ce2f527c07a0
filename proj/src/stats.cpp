#include "subscan/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "subscan/error.hpp"
#include "subscan/rng.hpp"

namespace subscan {

std::string ScanEngine::describe() const {
    if (exact) return "exact(budget=" + std::to_string(exact_budget) + ")";
    return "las(restarts=" + std::to_string(restarts) + ",max_iters=" + std::to_string(max_iters) + ")";
}

namespace {

// Correctly rounded summation (Shewchuk's partials, as in Python's math.fsum).
// The result depends only on the multiset of addends, so permuting a matrix
// cannot change its sum in the last bit.
class ExactSum {
public:
    void add(double x) {
        std::size_t used = 0;
        for (double y : partials_) {
            if (std::abs(x) < std::abs(y)) std::swap(x, y);
            const double hi = x + y;
            const double lo = y - (hi - x);
            if (lo != 0.0) partials_[used++] = lo;
            x = hi;
        }
        partials_.resize(used);
        partials_.push_back(x);
    }

    double value() const {
        if (partials_.empty()) return 0.0;
        std::size_t n = partials_.size();
        double hi = partials_[--n];
        double lo = 0.0;
        while (n > 0) {
            const double x = hi;
            const double y = partials_[--n];
            hi = x + y;
            lo = y - (hi - x);
            if (lo != 0.0) break;
        }
        // round-half-even correction when the remaining partials push past a tie
        if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
            const double y = lo * 2.0;
            const double x = hi + y;
            if (y == x - hi) hi = x;
        }
        return hi;
    }

private:
    std::vector<double> partials_;
};

}  // namespace

double sum_stat(const DataMatrix& X) {
    ExactSum s;
    for (double v : X.values()) s.add(v);
    return s.value();
}

double submatrix_sum(const DataMatrix& X, const SubmatrixSupport& s) {
    s.validate(X.rows(), X.cols());
    ExactSum total;
    for (std::size_t i : s.rows) {
        const auto row = X.row(i);
        for (std::size_t j : s.cols) total.add(row[j]);
    }
    return total.value();
}

std::uint64_t exact_scan_cost(std::size_t M, std::size_t N, std::size_t m) {
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    // C(M, m) built incrementally; each partial product C(M-m+i, i) is exact.
    const std::size_t k = std::min(m, M - m);
    unsigned __int128 c = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        c = c * (M - k + i) / i;
        if (c > kMax) return kMax;
    }
    c *= N;
    return c > kMax ? kMax : static_cast<std::uint64_t>(c);
}

void check_scan_size(const DataMatrix& X, std::size_t m, std::size_t n) {
    if (m == 0 || n == 0 || m > X.rows() || n > X.cols()) {
        throw DimensionError("scan size " + std::to_string(m) + "x" + std::to_string(n) +
                             " invalid for a " + std::to_string(X.rows()) + "x" +
                             std::to_string(X.cols()) + " matrix");
    }
}

namespace {

// Indices of the k largest scores, preferring the smaller index among equal
// scores; returned sorted ascending.
void select_top(std::span<const double> score, std::size_t k, std::vector<double>& scratch,
                std::vector<std::size_t>& out) {
    out.clear();
    if (k >= score.size()) {
        for (std::size_t i = 0; i < score.size(); ++i) out.push_back(i);
        return;
    }
    if (k == 1) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < score.size(); ++i) {
            if (score[i] > score[arg]) arg = i;
        }
        out.push_back(arg);
        return;
    }
    scratch.assign(score.begin(), score.end());
    const auto kth = scratch.begin() + static_cast<long>(k) - 1;
    std::nth_element(scratch.begin(), kth, scratch.end(), std::greater<>());
    const double threshold = *kth;
    std::size_t above = 0;
    for (auto it = scratch.begin(); it != kth; ++it) above += *it > threshold;
    std::size_t ties = k - above;
    for (std::size_t i = 0; i < score.size(); ++i) {
        if (score[i] > threshold) {
            out.push_back(i);
        } else if (score[i] == threshold && ties > 0) {
            out.push_back(i);
            --ties;
        }
    }
}

// acc[j] = sum over i in `pick` of A(i, j). Element-wise adds only, so every
// clone produces bit-identical sums.
__attribute__((target_clones("avx512f", "avx2", "default")))
void accumulate_rows(const DataMatrix& A, const std::vector<std::size_t>& pick, std::vector<double>& acc) {
    const std::size_t width = A.cols();
    const auto first = A.row(pick.front());
    acc.assign(first.begin(), first.end());
    double* out = acc.data();
    for (std::size_t i : std::span(pick).subspan(1)) {
        const double* src = A.row(i).data();
        for (std::size_t j = 0; j < width; ++j) out[j] += src[j];
    }
}

double sum_at(const std::vector<double>& acc, const std::vector<std::size_t>& idx) {
    double s = 0.0;
    for (std::size_t i : idx) s += acc[i];
    return s;
}

std::vector<std::size_t> iota_vec(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

}  // namespace

Scanner::Scanner(const DataMatrix& X) : X_(&X), T_(X.transposed()) {}

ScanResult Scanner::exact(std::size_t m, std::size_t n, std::uint64_t budget) const {
    const DataMatrix& X = *X_;
    check_scan_size(X, m, n);
    const std::size_t M = X.rows();
    const std::size_t N = X.cols();
    const std::uint64_t cost = exact_scan_cost(M, N, m);
    if (cost > budget) {
        throw BudgetExceeded("exact scan needs C(" + std::to_string(M) + "," + std::to_string(m) + ")*" +
                             std::to_string(N) + " = " + std::to_string(cost) +
                             " steps, over budget " + std::to_string(budget) + "; use scan_las");
    }

    std::vector<std::size_t> rows = iota_vec(m);
    std::vector<double> acc;
    std::vector<double> scratch;
    std::vector<std::size_t> cols;

    ScanResult best;
    best.exact = true;
    bool have = false;
    double best_value = 0.0;
    for (;;) {
        accumulate_rows(X, rows, acc);
        select_top(acc, n, scratch, cols);
        const double v = sum_at(acc, cols);
        if (!have || v > best_value) {
            have = true;
            best_value = v;
            best.support.rows = rows;
            best.support.cols = cols;
        }
        // next combination in lexicographic order
        std::size_t pos = m;
        while (pos > 0 && rows[pos - 1] == M - m + pos - 1) --pos;
        if (pos == 0) break;
        ++rows[pos - 1];
        for (std::size_t q = pos; q < m; ++q) rows[q] = rows[q - 1] + 1;
    }
    best.value = submatrix_sum(X, best.support);
    return best;
}

ScanResult Scanner::las(std::size_t m, std::size_t n, const LasOptions& opts, std::uint64_t seed) const {
    const DataMatrix& X = *X_;
    check_scan_size(X, m, n);
    if (opts.restarts < 1) throw InvalidParameter("LAS needs at least one restart");
    if (opts.max_iters < 1) throw InvalidParameter("LAS needs max_iters >= 1");
    const std::size_t M = X.rows();
    const std::size_t N = X.cols();
    const bool all_rows = m == M;
    const bool all_cols = n == N;

    std::vector<double> row_acc;
    std::vector<double> col_acc;
    std::vector<double> scratch;
    std::vector<std::size_t> rows, cols, next_rows, next_cols;
    std::vector<std::size_t> pool(N);

    ScanResult best;
    best.exact = false;
    best.restarts_used = opts.restarts;
    bool have = false;
    double best_value = 0.0;

    for (int r = 0; r < opts.restarts; ++r) {
        std::vector<double> trace;
        if (all_cols) {
            cols = iota_vec(N);
        } else {
            Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(r)}));
            std::iota(pool.begin(), pool.end(), std::size_t{0});
            for (std::size_t k = 0; k < n; ++k) {
                const std::size_t pick = k + static_cast<std::size_t>(rng.below(N - k));
                std::swap(pool[k], pool[pick]);
            }
            cols.assign(pool.begin(), pool.begin() + static_cast<long>(n));
            std::sort(cols.begin(), cols.end());
        }
        rows.clear();
        if (all_rows) rows = iota_vec(M);

        int iter = 0;
        double value = 0.0;
        while (iter < opts.max_iters) {
            ++iter;
            if (all_rows) {
                next_rows = rows;
            } else {
                accumulate_rows(T_, cols, row_acc);
                select_top(row_acc, m, scratch, next_rows);
                value = sum_at(row_acc, next_rows);
                if (opts.record_trace) trace.push_back(value);
            }
            if (all_cols) {
                next_cols = cols;
            } else {
                accumulate_rows(X, next_rows, col_acc);
                select_top(col_acc, n, scratch, next_cols);
                value = sum_at(col_acc, next_cols);
                if (opts.record_trace) trace.push_back(value);
            }
            // rows are a function of cols, so a repeated column set means the
            // next row step reproduces next_rows: the support is a fixed point.
            const bool converged = next_cols == cols;
            rows.swap(next_rows);
            cols.swap(next_cols);
            if (converged) break;
        }
        if (all_rows && all_cols) value = sum_stat(X);
        best.iterations += iter;

        if (!have || value > best_value) {
            have = true;
            best_value = value;
            best.support.rows = rows;
            best.support.cols = cols;
        }
        if (opts.record_trace) best.trace.push_back(std::move(trace));
    }
    best.value = submatrix_sum(X, best.support);
    return best;
}

ScanResult Scanner::scan(std::size_t m, std::size_t n, const ScanEngine& engine, std::uint64_t seed) const {
    if (engine.exact) return exact(m, n, engine.exact_budget);
    return las(m, n, engine.las_options(), seed);
}

ScanResult scan_exact(const DataMatrix& X, std::size_t m, std::size_t n, std::uint64_t budget) {
    check_scan_size(X, m, n);
    return Scanner(X).exact(m, n, budget);
}

ScanResult scan_las(const DataMatrix& X, std::size_t m, std::size_t n, const LasOptions& opts,
                    std::uint64_t seed) {
    check_scan_size(X, m, n);
    return Scanner(X).las(m, n, opts, seed);
}

}  // namespace subscan
