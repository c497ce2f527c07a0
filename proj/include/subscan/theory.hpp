#pragma once

#include <cstdint>

namespace subscan {

/// Signal level at which the scan detectability ratio equals one:
/// sqrt(2 (m log(M/m) + n log(N/n)) / (m n)), natural log.
/// Requires 1 <= m <= M, 1 <= n <= N, and not both m == M and n == N.
double theta_crit(std::uint64_t M, std::uint64_t N, std::uint64_t m, std::uint64_t n);

struct RegimeReport {
    std::uint64_t M = 0, N = 0, m = 0, n = 0;
    double theta = 0.0;
    double theta_crit = 0.0;
    double scan_ratio = 0.0;  // theta / theta_crit
    double sum_ratio = 0.0;   // theta m n / sqrt(M N)
};

RegimeReport detection_ratios(double theta, std::uint64_t M, std::uint64_t N, std::uint64_t m,
                              std::uint64_t n);

/// log C(n, k) via lgamma.
double log_binomial(std::uint64_t n, std::uint64_t k);

/// Log of the Bernstein tail bound for the mean of `sample_count` draws
/// without replacement from a finite population with variance `variance`
/// and max-minus-mean `spread`:
///     -sample_count t^2 / (2 variance + (2/3) spread t).
/// Returns 0 at t = 0. Throws InvalidParameter when t > 0 and the
/// denominator vanishes (a degenerate population).
double bernstein_log_tail(std::uint64_t sample_count, double t, double variance, double spread);

/// Union bound on the log of the Bonferroni-corrected p-value:
/// log(MN) + log C(M,m) + log C(N,n) + bernstein_log_tail(mn, t, variance, spread).
/// Positive results are vacuous.
double log_pvalue_bound(std::uint64_t M, std::uint64_t N, std::uint64_t m, std::uint64_t n, double t,
                        double variance, double spread);

}  // namespace subscan
