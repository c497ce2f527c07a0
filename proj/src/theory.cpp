#include "subscan/theory.hpp"

#include <cmath>
#include <string>

#include "subscan/error.hpp"

namespace subscan {

namespace {

void check_sizes(std::uint64_t M, std::uint64_t N, std::uint64_t m, std::uint64_t n) {
    if (m == 0 || n == 0 || m > M || n > N) {
        throw InvalidParameter("need 1 <= m <= M and 1 <= n <= N");
    }
}

double entropy_term(std::uint64_t M, std::uint64_t N, std::uint64_t m, std::uint64_t n) {
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    return md * std::log(static_cast<double>(M) / md) + nd * std::log(static_cast<double>(N) / nd);
}

}  // namespace

double theta_crit(std::uint64_t M, std::uint64_t N, std::uint64_t m, std::uint64_t n) {
    check_sizes(M, N, m, n);
    if (m == M && n == N) throw InvalidParameter("theta_crit is zero for the full matrix");
    const double mn = static_cast<double>(m) * static_cast<double>(n);
    return std::sqrt(2.0 * entropy_term(M, N, m, n) / mn);
}

RegimeReport detection_ratios(double theta, std::uint64_t M, std::uint64_t N, std::uint64_t m,
                              std::uint64_t n) {
    if (!(theta >= 0.0) || !std::isfinite(theta)) throw InvalidParameter("theta must be finite and >= 0");
    RegimeReport r;
    r.M = M;
    r.N = N;
    r.m = m;
    r.n = n;
    r.theta = theta;
    r.theta_crit = theta_crit(M, N, m, n);
    r.scan_ratio = theta / r.theta_crit;
    const double mn = static_cast<double>(m) * static_cast<double>(n);
    r.sum_ratio = theta * mn / std::sqrt(static_cast<double>(M) * static_cast<double>(N));
    return r;
}

double log_binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) throw InvalidParameter("log_binomial needs k <= n");
    if (k == 0 || k == n) return 0.0;
    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);
    return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0);
}

double bernstein_log_tail(std::uint64_t sample_count, double t, double variance, double spread) {
    if (!(t >= 0.0) || !(variance >= 0.0) || !(spread >= 0.0)) {
        throw InvalidParameter("bernstein_log_tail needs t, variance, spread >= 0");
    }
    if (t == 0.0) return 0.0;
    const double denom = 2.0 * variance + (2.0 / 3.0) * spread * t;
    if (!(denom > 0.0)) throw InvalidParameter("degenerate population: zero variance and spread");
    return -static_cast<double>(sample_count) * t * t / denom;
}

double log_pvalue_bound(std::uint64_t M, std::uint64_t N, std::uint64_t m, std::uint64_t n, double t,
                        double variance, double spread) {
    check_sizes(M, N, m, n);
    return std::log(static_cast<double>(M) * static_cast<double>(N)) + log_binomial(M, m) +
           log_binomial(N, n) + bernstein_log_tail(m * n, t, variance, spread);
}

}  // namespace subscan
