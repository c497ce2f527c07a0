#include "subscan/detect.hpp"

#include <algorithm>
#include <string>

#include "subscan/error.hpp"
#include "subscan/net.hpp"

namespace subscan {

std::string_view to_string(Correction c) noexcept {
    switch (c) {
        case Correction::Single: return "single";
        case Correction::FullGrid: return "full-grid";
        case Correction::Net: return "net";
    }
    return "unknown";
}

std::vector<SizePair> TestOutcome::sizes_tested() const {
    std::vector<SizePair> out;
    out.reserve(per_size.size());
    for (const auto& s : per_size) out.emplace_back(s.m, s.n);
    return out;
}

double TestOutcome::min_pvalue() const {
    double best = 1.0;
    for (const auto& s : per_size) best = std::min(best, s.p.value);
    return best;
}

double bonferroni_correct(std::uint64_t factor, double min_p) {
    return std::min(static_cast<double>(factor) * min_p, 1.0);
}

MCConfig per_size_config(const MCConfig& cfg, std::size_t m, std::size_t n) {
    MCConfig out = cfg;
    out.seed = derive_seed(cfg.seed, {m, n});
    return out;
}

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0, 1)");
}

TestOutcome run_sizes(const DataMatrix& X, const std::vector<SizePair>& sizes, const MCConfig& cfg, double alpha,
                      Correction correction, std::uint64_t factor) {
    check_alpha(alpha);
    if (sizes.empty()) throw InvalidParameter("size list is empty");
    for (auto [m, n] : sizes) check_scan_size(X, m, n);

    TestOutcome out;
    out.alpha = alpha;
    out.correction = correction;
    out.correction_factor = factor;
    out.seed = cfg.seed;
    out.B = cfg.B;
    out.kind = cfg.kind;
    out.engine = cfg.engine;
    out.shared_permutations = cfg.share_permutations && sizes.size() > 1;

    std::vector<PValue> ps;
    if (out.shared_permutations) {
        ps = mc_pvalues_shared(X, sizes, cfg);
    } else {
        ps.reserve(sizes.size());
        for (auto [m, n] : sizes) ps.push_back(mc_pvalue(X, m, n, per_size_config(cfg, m, n)));
    }
    for (std::size_t s = 0; s < sizes.size(); ++s) out.per_size.push_back({sizes[s].first, sizes[s].second, ps[s]});

    out.corrected_pvalue = bonferroni_correct(factor, out.min_pvalue());
    out.reject = out.corrected_pvalue <= alpha;
    return out;
}

}  // namespace

TestOutcome single_size_test(const DataMatrix& X, std::size_t m, std::size_t n, const MCConfig& cfg,
                             double alpha) {
    return run_sizes(X, {{m, n}}, cfg, alpha, Correction::Single, 1);
}

TestOutcome bonferroni_full(const DataMatrix& X, const std::vector<SizePair>& sizes, const MCConfig& cfg,
                            double alpha) {
    return run_sizes(X, sizes, cfg, alpha, Correction::FullGrid,
                     static_cast<std::uint64_t>(X.rows()) * X.cols());
}

TestOutcome bonferroni_net(const DataMatrix& X, unsigned kM, unsigned kN, const MCConfig& cfg, double alpha) {
    const ApproxNet rows = build_net(X.rows(), kM);
    const ApproxNet cols = build_net(X.cols(), kN);
    std::vector<SizePair> sizes;
    sizes.reserve(rows.size() * cols.size());
    for (auto m : rows.elements) {
        for (auto n : cols.elements) sizes.emplace_back(m, n);
    }
    TestOutcome out = run_sizes(X, sizes, cfg, alpha, Correction::Net,
                                static_cast<std::uint64_t>(rows.size()) * cols.size());
    out.kM = kM;
    out.kN = kN;
    return out;
}

UpperBound upper_bound_single_pair(const DataMatrix& X, std::size_t m, std::size_t n, unsigned kM, unsigned kN,
                                   const MCConfig& cfg) {
    const ApproxNet rows = build_net(X.rows(), kM);
    const ApproxNet cols = build_net(X.cols(), kN);
    const auto m_up = neighbor(rows, m, NeighborMode::Above);
    const auto n_up = neighbor(cols, n, NeighborMode::Above);
    if (!m_up || !n_up) {
        throw InvalidParameter("no net element above (" + std::to_string(m) + ", " + std::to_string(n) +
                               "); use the below neighbor or the full net sweep");
    }
    UpperBound out;
    out.m_neighbor = static_cast<std::size_t>(*m_up);
    out.n_neighbor = static_cast<std::size_t>(*n_up);
    out.correction_factor = static_cast<std::uint64_t>(rows.size()) * cols.size();
    out.p = mc_pvalue(X, out.m_neighbor, out.n_neighbor, per_size_config(cfg, out.m_neighbor, out.n_neighbor));
    out.bound = bonferroni_correct(out.correction_factor, out.p.value);
    return out;
}

}  // namespace subscan
