#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace subscan {

/// Binary digits a_0 .. a_L of c (least significant first), a_L = 1.
std::vector<int> binary_digits(std::uint64_t c);

/// Keeps the k most significant binary digits of c and zeroes the rest.
/// Throws InvalidParameter for c == 0 or k == 0.
std::uint64_t k_binary_approx(std::uint64_t c, unsigned k);

/// The set of k-binary approximations of 1..M, stored sorted ascending.
struct ApproxNet {
    std::uint64_t M = 0;
    unsigned k = 0;
    std::vector<std::uint64_t> elements;

    std::size_t size() const noexcept { return elements.size(); }
};

ApproxNet build_net(std::uint64_t M, unsigned k);

/// max(1, floor(log2(log2(M)))), computed in integer arithmetic.
/// Throws InvalidParameter for M < 2.
unsigned default_k(std::uint64_t M);

enum class NeighborMode { Below, Above };

/// Below: largest element <= m (always exists). Above: smallest element > m,
/// or nullopt when m is at or past the largest element.
std::optional<std::uint64_t> neighbor(const ApproxNet& net, std::uint64_t m, NeighborMode mode);

/// Zero-padded binary rendering of c in `width` digits.
std::string to_binary(std::uint64_t c, unsigned width);

}  // namespace subscan
