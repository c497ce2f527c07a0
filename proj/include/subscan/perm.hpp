#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "subscan/matrix.hpp"
#include "subscan/rng.hpp"
#include "subscan/stats.hpp"

namespace subscan {

/// Unidimensional shuffles entries within each row; Bidimensional shuffles
/// all M*N entries jointly.
enum class PermutationKind { Unidimensional, Bidimensional };

std::string_view to_string(PermutationKind kind) noexcept;
/// Accepts "uni"/"unidimensional"/"row" and "bi"/"bidimensional"/"all".
PermutationKind parse_permutation_kind(std::string_view name);

/// Monte Carlo calibration parameters.
struct MCConfig {
    std::uint64_t B = 500;
    PermutationKind kind = PermutationKind::Bidimensional;
    std::uint64_t seed = 0;
    ScanEngine engine;
    // Multi-size tests only: score every size on one shared stream of
    // permutations instead of an independent stream per size.
    bool share_permutations = false;
    unsigned threads = 1;  // 0 = hardware concurrency
};

struct PValue {
    double value = 1.0;
    std::uint64_t exceedances = 0;
    std::uint64_t B = 0;

    friend bool operator==(const PValue&, const PValue&) = default;
};

/// (exceedances + 1) / (B + 1)
PValue monte_carlo_pvalue(std::uint64_t exceedances, std::uint64_t B);

DataMatrix permute(const DataMatrix& X, PermutationKind kind, std::uint64_t seed);

/// In-place Fisher-Yates shuffle of `X` according to `kind`, drawing from rng.
void shuffle_in_place(DataMatrix& X, PermutationKind kind, Rng& rng);

/// Seed of the permutation used by replicate b of a stream rooted at `seed`.
std::uint64_t replicate_permutation_seed(std::uint64_t seed, std::uint64_t b);

/// Monte Carlo permutation p-value of the m x n scan statistic. Replicate b
/// uses a permutation and a scan seed derived from (cfg.seed, b), so the
/// result does not depend on cfg.threads. Ties count as exceedances.
PValue mc_pvalue(const DataMatrix& X, std::size_t m, std::size_t n, const MCConfig& cfg);

/// Monte Carlo p-values for several sizes scored against one shared stream
/// of B permutations (one permuted matrix per replicate, all sizes scanned on
/// it). Output is index-aligned with `sizes`.
std::vector<PValue> mc_pvalues_shared(const DataMatrix& X,
                                      const std::vector<std::pair<std::size_t, std::size_t>>& sizes,
                                      const MCConfig& cfg);

inline constexpr std::uint64_t kExactPermutationBudget = 1'000'000;

/// Exact permutation p-value by enumerating the whole permutation group with
/// the exact scan: count of permutations (identity included) whose scan is
/// >= the observed scan, over the group order. Bidimensional requires
/// M*N <= 8; Unidimensional requires (N!)^M <= 10^6.
PValue exact_pvalue_enum(const DataMatrix& X, std::size_t m, std::size_t n, PermutationKind kind);

}  // namespace subscan
