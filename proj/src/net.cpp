#include "subscan/net.hpp"

#include <algorithm>
#include <bit>

#include "subscan/error.hpp"

namespace subscan {

std::vector<int> binary_digits(std::uint64_t c) {
    if (c == 0) throw InvalidParameter("binary expansion needs c >= 1");
    std::vector<int> digits;
    for (; c != 0; c >>= 1) digits.push_back(static_cast<int>(c & 1u));
    return digits;
}

std::uint64_t k_binary_approx(std::uint64_t c, unsigned k) {
    if (c == 0) throw InvalidParameter("k-binary approximation needs c >= 1");
    if (k == 0) throw InvalidParameter("k-binary approximation needs k >= 1");
    const unsigned top = static_cast<unsigned>(std::bit_width(c)) - 1;  // floor(log2 c)
    if (top + 1 <= k) return c;
    const unsigned dropped = top + 1 - k;
    return (c >> dropped) << dropped;
}

ApproxNet build_net(std::uint64_t M, unsigned k) {
    if (M == 0) throw InvalidParameter("approximation net needs M >= 1");
    if (k == 0) throw InvalidParameter("approximation net needs k >= 1");
    ApproxNet net{M, k, {}};
    // The net is exactly the set of v <= M with at most k significant digits:
    // such v is its own approximation, and every approximation has this form.
    const unsigned width = static_cast<unsigned>(std::bit_width(M));
    for (unsigned len = 1; len <= width; ++len) {
        const unsigned kept = std::min(len, k);
        const unsigned shift = len - kept;
        const std::uint64_t lo = std::uint64_t{1} << (kept - 1);
        const std::uint64_t hi = std::uint64_t{1} << kept;
        for (std::uint64_t prefix = lo; prefix < hi; ++prefix) {
            const std::uint64_t v = prefix << shift;
            if (v > M) break;
            net.elements.push_back(v);
        }
    }
    return net;
}

unsigned default_k(std::uint64_t M) {
    if (M < 2) throw InvalidParameter("default k needs M >= 2");
    // floor(log2(log2 M)) >= j  <=>  log2 M >= 2^j  <=>  M >= 2^(2^j)
    unsigned j = 0;
    while (j < 5 && M >= (std::uint64_t{1} << (1u << (j + 1)))) ++j;  // 2^(2^6) overflows; log2 M < 64
    return std::max(1u, j);
}

std::optional<std::uint64_t> neighbor(const ApproxNet& net, std::uint64_t m, NeighborMode mode) {
    const auto& e = net.elements;
    if (mode == NeighborMode::Below) {
        auto it = std::upper_bound(e.begin(), e.end(), m);
        if (it == e.begin()) return std::nullopt;
        return *std::prev(it);
    }
    auto it = std::upper_bound(e.begin(), e.end(), m);
    if (it == e.end()) return std::nullopt;
    return *it;
}

std::string to_binary(std::uint64_t c, unsigned width) {
    std::string s(width, '0');
    for (unsigned i = 0; i < width && c != 0; ++i, c >>= 1) {
        if (c & 1u) s[width - 1 - i] = '1';
    }
    return s;
}

}  // namespace subscan
