#include "subscan/perm.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "subscan/error.hpp"
#include "subscan/parallel.hpp"

namespace subscan {

namespace {

// Path tags keep the observed-scan, permutation and replicate-scan streams
// disjoint.
constexpr std::uint64_t kObservedTag = 0x0b5e;
constexpr std::uint64_t kPermTag = 0x9e47;
constexpr std::uint64_t kScanTag = 0x5ca9;

void fisher_yates(std::span<double> v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace

std::string_view to_string(PermutationKind kind) noexcept {
    return kind == PermutationKind::Unidimensional ? "unidimensional" : "bidimensional";
}

PermutationKind parse_permutation_kind(std::string_view name) {
    if (name == "uni" || name == "unidimensional" || name == "row") return PermutationKind::Unidimensional;
    if (name == "bi" || name == "bidimensional" || name == "all") return PermutationKind::Bidimensional;
    throw InvalidParameter("unknown permutation kind '" + std::string(name) + "'");
}

PValue monte_carlo_pvalue(std::uint64_t exceedances, std::uint64_t B) {
    if (exceedances > B) throw InvalidParameter("exceedances cannot exceed B");
    return {static_cast<double>(exceedances + 1) / static_cast<double>(B + 1), exceedances, B};
}

void shuffle_in_place(DataMatrix& X, PermutationKind kind, Rng& rng) {
    if (kind == PermutationKind::Bidimensional) {
        fisher_yates(X.values(), rng);
        return;
    }
    for (std::size_t i = 0; i < X.rows(); ++i) fisher_yates(X.row(i), rng);
}

DataMatrix permute(const DataMatrix& X, PermutationKind kind, std::uint64_t seed) {
    DataMatrix out = X;
    Rng rng(seed);
    shuffle_in_place(out, kind, rng);
    return out;
}

std::uint64_t replicate_permutation_seed(std::uint64_t seed, std::uint64_t b) {
    return derive_seed(seed, {kPermTag, b});
}

PValue mc_pvalue(const DataMatrix& X, std::size_t m, std::size_t n, const MCConfig& cfg) {
    check_scan_size(X, m, n);
    if (cfg.B == 0) throw InvalidParameter("B must be at least 1");

    const double observed = Scanner(X).scan(m, n, cfg.engine, derive_seed(cfg.seed, {kObservedTag})).value;

    const unsigned workers = worker_count(cfg.B, cfg.threads);
    std::vector<std::uint64_t> partial(workers, 0);
    std::vector<DataMatrix> buffers(workers, X);
    parallel_for(cfg.B, cfg.threads, [&](unsigned w, std::size_t b) {
        DataMatrix& Xp = buffers[w];
        std::copy(X.values().begin(), X.values().end(), Xp.values().begin());
        Rng rng(replicate_permutation_seed(cfg.seed, b));
        shuffle_in_place(Xp, cfg.kind, rng);
        const double s = Scanner(Xp).scan(m, n, cfg.engine, derive_seed(cfg.seed, {kScanTag, b})).value;
        if (s >= observed) ++partial[w];
    });
    return monte_carlo_pvalue(std::accumulate(partial.begin(), partial.end(), std::uint64_t{0}), cfg.B);
}

std::vector<PValue> mc_pvalues_shared(const DataMatrix& X,
                                      const std::vector<std::pair<std::size_t, std::size_t>>& sizes,
                                      const MCConfig& cfg) {
    if (cfg.B == 0) throw InvalidParameter("B must be at least 1");
    for (auto [m, n] : sizes) check_scan_size(X, m, n);

    std::vector<double> observed(sizes.size());
    {
        const Scanner scanner(X);
        for (std::size_t s = 0; s < sizes.size(); ++s) {
            const auto [m, n] = sizes[s];
            observed[s] = scanner.scan(m, n, cfg.engine, derive_seed(cfg.seed, {kObservedTag, m, n})).value;
        }
    }

    const unsigned workers = worker_count(cfg.B, cfg.threads);
    std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(sizes.size(), 0));
    std::vector<DataMatrix> buffers(workers, X);
    parallel_for(cfg.B, cfg.threads, [&](unsigned w, std::size_t b) {
        DataMatrix& Xp = buffers[w];
        std::copy(X.values().begin(), X.values().end(), Xp.values().begin());
        Rng rng(replicate_permutation_seed(cfg.seed, b));
        shuffle_in_place(Xp, cfg.kind, rng);
        const Scanner scanner(Xp);
        for (std::size_t s = 0; s < sizes.size(); ++s) {
            const auto [m, n] = sizes[s];
            const double v = scanner.scan(m, n, cfg.engine, derive_seed(cfg.seed, {kScanTag, b, m, n})).value;
            if (v >= observed[s]) ++partial[w][s];
        }
    });

    std::vector<PValue> out;
    out.reserve(sizes.size());
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        std::uint64_t count = 0;
        for (const auto& p : partial) count += p[s];
        out.push_back(monte_carlo_pvalue(count, cfg.B));
    }
    return out;
}

PValue exact_pvalue_enum(const DataMatrix& X, std::size_t m, std::size_t n, PermutationKind kind) {
    check_scan_size(X, m, n);
    const double observed = scan_exact(X, m, n).value;
    const std::size_t M = X.rows();
    const std::size_t N = X.cols();

    std::uint64_t count = 0;
    std::uint64_t total = 0;
    DataMatrix Xp = X;

    if (kind == PermutationKind::Bidimensional) {
        if (M * N > 8) {
            throw BudgetExceeded("exact bidimensional enumeration needs M*N <= 8, got " + std::to_string(M * N));
        }
        std::vector<std::size_t> perm(M * N);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        const auto src = X.values();
        do {
            auto dst = Xp.values();
            for (std::size_t p = 0; p < perm.size(); ++p) dst[p] = src[perm[p]];
            ++total;
            if (scan_exact(Xp, m, n).value >= observed) ++count;
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        double group = 1.0;
        for (std::size_t i = 0; i < M; ++i) {
            for (std::size_t k = 2; k <= N; ++k) group *= static_cast<double>(k);
        }
        if (group > static_cast<double>(kExactPermutationBudget)) {
            throw BudgetExceeded("exact unidimensional enumeration needs (N!)^M <= 1e6");
        }
        std::vector<std::vector<std::size_t>> perms(M, std::vector<std::size_t>(N));
        for (auto& p : perms) std::iota(p.begin(), p.end(), std::size_t{0});
        for (;;) {
            for (std::size_t i = 0; i < M; ++i) {
                const auto src = X.row(i);
                auto dst = Xp.row(i);
                for (std::size_t j = 0; j < N; ++j) dst[j] = src[perms[i][j]];
            }
            ++total;
            if (scan_exact(Xp, m, n).value >= observed) ++count;
            // odometer over the per-row permutations
            std::size_t r = M;
            while (r > 0 && !std::next_permutation(perms[r - 1].begin(), perms[r - 1].end())) --r;
            if (r == 0) break;
        }
    }
    return {static_cast<double>(count) / static_cast<double>(total), count, total};
}

}  // namespace subscan
