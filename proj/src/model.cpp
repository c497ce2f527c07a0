#include "subscan/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "subscan/error.hpp"

namespace subscan {

std::string_view to_string(FamilyKind kind) noexcept {
    switch (kind) {
        case FamilyKind::Gaussian: return "gaussian";
        case FamilyKind::CenteredPoisson: return "poisson";
        case FamilyKind::Rademacher: return "rademacher";
    }
    return "unknown";
}

FamilyKind parse_family(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "gaussian" || lower == "normal") return FamilyKind::Gaussian;
    if (lower == "poisson" || lower == "centered-poisson" || lower == "centeredpoisson") {
        return FamilyKind::CenteredPoisson;
    }
    if (lower == "rademacher") return FamilyKind::Rademacher;
    throw InvalidParameter("unknown noise family '" + std::string(name) + "'");
}

double log_mgf(NoiseFamily family, double theta) {
    if (!std::isfinite(theta)) throw InvalidParameter("tilt parameter must be finite");
    switch (family.kind) {
        case FamilyKind::Gaussian: return 0.5 * theta * theta;
        case FamilyKind::CenteredPoisson: return std::expm1(theta) - theta;
        case FamilyKind::Rademacher: {
            // log cosh without overflow for large |theta|
            const double a = std::fabs(theta);
            return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
        }
    }
    throw InvalidParameter("unknown noise family");
}

TiltedDistribution::TiltedDistribution(NoiseFamily family, double theta)
    : family_(family), theta_(theta) {
    if (!std::isfinite(theta) || theta < 0.0 || !(theta < family.theta_star())) {
        throw InvalidParameter("tilt must satisfy 0 <= theta < theta_star, got " + std::to_string(theta));
    }
    switch (family.kind) {
        case FamilyKind::Gaussian: break;
        case FamilyKind::CenteredPoisson: param_ = std::exp(theta); break;
        case FamilyKind::Rademacher: param_ = 1.0 / (1.0 + std::exp(-2.0 * theta)); break;
    }
}

double TiltedDistribution::mean() const noexcept {
    switch (family_.kind) {
        case FamilyKind::Gaussian: return theta_;
        case FamilyKind::CenteredPoisson: return std::expm1(theta_);
        case FamilyKind::Rademacher: return std::tanh(theta_);
    }
    return 0.0;
}

double TiltedDistribution::draw(Rng& rng) const {
    switch (family_.kind) {
        case FamilyKind::Gaussian: return theta_ + rng.normal();
        case FamilyKind::CenteredPoisson: return static_cast<double>(sample_poisson(param_, rng)) - 1.0;
        case FamilyKind::Rademacher: return rng.uniform() < param_ ? 1.0 : -1.0;
    }
    return 0.0;
}

std::uint64_t sample_poisson(double lambda, Rng& rng) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidParameter("Poisson rate must be finite and >= 0");
    if (lambda == 0.0) return 0;
    if (lambda < 10.0) {
        double p = std::exp(-lambda);
        double cdf = p;
        const double u = rng.uniform();
        std::uint64_t k = 0;
        while (u >= cdf) {
            ++k;
            p *= lambda / static_cast<double>(k);
            const double next = cdf + p;
            if (next == cdf) break;  // tail underflow
            cdf = next;
        }
        return k;
    }
    // PTRS (Hormann 1993).
    const double slam = std::sqrt(lambda);
    const double loglam = std::log(lambda);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        const double lhs = std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b);
        const double rhs = -lambda + k * loglam - std::lgamma(k + 1.0);
        if (lhs <= rhs) return static_cast<std::uint64_t>(k);
    }
}

std::vector<double> sample_tilted(const TiltedDistribution& dist, std::size_t count, std::uint64_t seed) {
    std::vector<double> out;
    out.reserve(count);
    Rng rng(seed);
    for (std::size_t i = 0; i < count; ++i) out.push_back(dist.draw(rng));
    return out;
}

PlantedInstance generate_instance(std::size_t M, std::size_t N, std::size_t m, std::size_t n,
                                  double theta, NoiseFamily family, std::uint64_t seed) {
    if (M == 0 || N == 0) throw DimensionError("matrix dimensions must be positive");
    if (m > M || n > N) {
        throw DimensionError("planted block " + std::to_string(m) + "x" + std::to_string(n) +
                             " does not fit in " + std::to_string(M) + "x" + std::to_string(N));
    }
    const TiltedDistribution noise(family, 0.0);
    const TiltedDistribution signal(family, theta);
    const bool planted = theta > 0.0 && m > 0 && n > 0;

    DataMatrix X(M, N);
    for (std::size_t i = 0; i < M; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
            Rng rng(derive_seed(seed, {i, j}));
            const bool inside = planted && i < m && j < n;
            X(i, j) = inside ? signal.draw(rng) : noise.draw(rng);
        }
    }

    PlantedInstance inst{std::move(X), std::nullopt, theta, family, seed};
    if (planted) inst.support = SubmatrixSupport::leading(m, n);
    return inst;
}

}  // namespace subscan
