#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subscan/matrix.hpp"
#include "subscan/rng.hpp"

namespace subscan {

/// Standardized base measures (mean 0, variance 1) that generate the
/// natural exponential families used for the noise and the planted signal.
enum class FamilyKind { Gaussian, CenteredPoisson, Rademacher };

struct NoiseFamily {
    FamilyKind kind = FamilyKind::Gaussian;

    /// Supremum of tilts with finite moment generating function.
    double theta_star() const noexcept { return std::numeric_limits<double>::infinity(); }

    friend bool operator==(const NoiseFamily&, const NoiseFamily&) = default;
};

std::string_view to_string(FamilyKind kind) noexcept;
/// Accepts "gaussian"/"normal", "poisson"/"centered-poisson", "rademacher".
FamilyKind parse_family(std::string_view name);

/// log E_nu[exp(theta X)]. Negative theta is allowed.
double log_mgf(NoiseFamily family, double theta);

/// Exponential tilt f_theta of a noise family: density exp(x theta - log_mgf(theta))
/// with respect to the base measure.
class TiltedDistribution {
public:
    /// Throws InvalidParameter unless 0 <= theta < theta_star and theta is finite.
    TiltedDistribution(NoiseFamily family, double theta);

    NoiseFamily family() const noexcept { return family_; }
    double theta() const noexcept { return theta_; }

    /// Mean of f_theta, i.e. the derivative of log_mgf at theta.
    double mean() const noexcept;

    double draw(Rng& rng) const;

private:
    NoiseFamily family_;
    double theta_;
    // Cached per-family constants (Poisson rate, Rademacher P(+1)).
    double param_ = 0.0;
};

std::vector<double> sample_tilted(const TiltedDistribution& dist, std::size_t count, std::uint64_t seed);

/// Poisson(lambda) variate: sequential inversion for lambda < 10, Hormann's
/// PTRS transformed rejection otherwise.
std::uint64_t sample_poisson(double lambda, Rng& rng);

struct PlantedInstance {
    DataMatrix data;
    std::optional<SubmatrixSupport> support;  // absent under the null
    double theta = 0.0;
    NoiseFamily family;
    std::uint64_t seed = 0;
};

/// M x N matrix with entries iid from the noise family, except the leading
/// m x n block which is iid from f_theta. Entry (i, j) draws from its own
/// stream derived from (seed, i, j), so the result is independent of the
/// generation order.
PlantedInstance generate_instance(std::size_t M, std::size_t N, std::size_t m, std::size_t n,
                                  double theta, NoiseFamily family, std::uint64_t seed);

}  // namespace subscan
