#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subscan/matrix.hpp"

namespace subscan {

inline constexpr std::uint64_t kDefaultExactBudget = 10'000'000;

struct ScanResult {
    double value = 0.0;  // submatrix_sum over `support`
    SubmatrixSupport support;
    bool exact = false;
    int restarts_used = 0;
    int iterations = 0;  // alternations summed over all restarts
    // Objective after every half-step, one vector per restart. Filled only
    // when LasOptions::record_trace is set.
    std::vector<std::vector<double>> trace;
};

struct LasOptions {
    int restarts = 20;
    int max_iters = 100;
    bool record_trace = false;
};

/// Which scan maximizer to use. The same engine must score the observed and
/// the permuted matrices of a permutation test.
struct ScanEngine {
    bool exact = false;
    int restarts = 20;
    int max_iters = 100;
    std::uint64_t exact_budget = kDefaultExactBudget;

    LasOptions las_options() const { return {restarts, max_iters, false}; }
    std::string describe() const;
};

double sum_stat(const DataMatrix& X);

/// Throws BoundsError if `s` does not fit X.
double submatrix_sum(const DataMatrix& X, const SubmatrixSupport& s);

/// Number of candidate row subsets times N, saturating at UINT64_MAX. This is
/// the quantity the exact scan's budget is checked against.
std::uint64_t exact_scan_cost(std::size_t M, std::size_t N, std::size_t m);

void check_scan_size(const DataMatrix& X, std::size_t m, std::size_t n);

/// Reusable scanner over one matrix. Keeps a transposed copy so that row sums
/// restricted to a column set and column sums restricted to a row set are
/// both contiguous accumulations; scanning many sizes over one matrix
/// amortizes the copy.
class Scanner {
public:
    explicit Scanner(const DataMatrix& X);

    const DataMatrix& matrix() const noexcept { return *X_; }

    /// Globally maximal m x n submatrix sum. Row subsets are enumerated in
    /// lexicographic order; for each, the best n columns are the top column
    /// sums restricted to those rows. Ties resolve to the lexicographically
    /// smallest (rows, cols).
    ScanResult exact(std::size_t m, std::size_t n, std::uint64_t budget = kDefaultExactBudget) const;

    /// Alternating maximization with random restarts. Restart r starts from a
    /// uniform random n-subset of columns drawn from derive_seed(seed, {r}),
    /// then alternates top-m rows / top-n columns (ties to the smaller index)
    /// until the support repeats or max_iters is reached. The best restart
    /// wins; on equal values the lowest restart index wins.
    ScanResult las(std::size_t m, std::size_t n, const LasOptions& opts, std::uint64_t seed) const;

    ScanResult scan(std::size_t m, std::size_t n, const ScanEngine& engine, std::uint64_t seed) const;

private:
    const DataMatrix* X_;
    DataMatrix T_;
};

ScanResult scan_exact(const DataMatrix& X, std::size_t m, std::size_t n,
                      std::uint64_t budget = kDefaultExactBudget);

ScanResult scan_las(const DataMatrix& X, std::size_t m, std::size_t n, const LasOptions& opts,
                    std::uint64_t seed);

inline ScanResult scan_las(const DataMatrix& X, std::size_t m, std::size_t n, int restarts, int max_iters,
                           std::uint64_t seed) {
    return scan_las(X, m, n, LasOptions{restarts, max_iters, false}, seed);
}

}  // namespace subscan
