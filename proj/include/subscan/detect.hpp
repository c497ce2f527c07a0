#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "subscan/matrix.hpp"
#include "subscan/perm.hpp"

namespace subscan {

using SizePair = std::pair<std::size_t, std::size_t>;

/// How the per-size p-values were combined.
///   Single    - one size, factor 1
///   FullGrid  - factor M * N regardless of how many sizes were tested
///   Net       - factor |S_kM(M)| * |S_kN(N)| over the approximation-net grid
enum class Correction { Single, FullGrid, Net };

std::string_view to_string(Correction c) noexcept;

struct SizePValue {
    std::size_t m = 0;
    std::size_t n = 0;
    PValue p;
};

struct TestOutcome {
    double corrected_pvalue = 1.0;
    std::vector<SizePValue> per_size;
    std::uint64_t correction_factor = 1;
    Correction correction = Correction::Single;
    double alpha = 0.05;
    bool reject = false;

    // provenance
    std::uint64_t seed = 0;
    std::uint64_t B = 0;
    PermutationKind kind = PermutationKind::Bidimensional;
    ScanEngine engine;
    bool shared_permutations = false;
    unsigned kM = 0;
    unsigned kN = 0;

    std::vector<SizePair> sizes_tested() const;
    double min_pvalue() const;
};

/// min(factor * min_p, 1)
double bonferroni_correct(std::uint64_t factor, double min_p);

/// Calibration used for size (m, n) when sizes have independent streams.
MCConfig per_size_config(const MCConfig& cfg, std::size_t m, std::size_t n);

TestOutcome single_size_test(const DataMatrix& X, std::size_t m, std::size_t n, const MCConfig& cfg,
                             double alpha);

/// Bonferroni over a caller-supplied size list with the conservative factor M*N.
TestOutcome bonferroni_full(const DataMatrix& X, const std::vector<SizePair>& sizes, const MCConfig& cfg,
                            double alpha);

/// Bonferroni over the Cartesian product of approximation nets S_kM(M) x S_kN(N).
TestOutcome bonferroni_net(const DataMatrix& X, unsigned kM, unsigned kN, const MCConfig& cfg, double alpha);

struct UpperBound {
    double bound = 1.0;
    std::size_t m_neighbor = 0;
    std::size_t n_neighbor = 0;
    PValue p;
    std::uint64_t correction_factor = 1;
};

/// min(|S_kM(M)| |S_kN(N)| p_{m',n'}, 1) where m', n' are the smallest net
/// elements strictly above m and n. Only one permutation test is run. Throws
/// InvalidParameter when either neighbor does not exist.
UpperBound upper_bound_single_pair(const DataMatrix& X, std::size_t m, std::size_t n, unsigned kM, unsigned kN,
                                   const MCConfig& cfg);

}  // namespace subscan
