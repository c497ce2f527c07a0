#include <doctest.h>

#include <cmath>
#include <set>

#include "subscan/error.hpp"
#include "subscan/net.hpp"

using namespace subscan;

namespace {

const std::vector<std::uint64_t> kTable1{1,   2,   3,   4,   5,   6,   7,   8,   10,  12,  14,  16,
                                         20,  24,  28,  32,  40,  48,  56,  64,  80,  96,  112, 128,
                                         160, 192, 224, 256, 320, 384, 448, 512, 640, 768, 896, 1024};

// Def. 2 by string manipulation: keep the leading k characters of the binary numeral.
std::uint64_t approx_by_digits(std::uint64_t c, unsigned k) {
    std::string bits;
    for (std::uint64_t v = c; v > 0; v >>= 1) bits.insert(bits.begin(), static_cast<char>('0' + (v & 1)));
    for (std::size_t i = k; i < bits.size(); ++i) bits[i] = '0';
    return std::stoull(bits, nullptr, 2);
}

}  // namespace

TEST_CASE("binary_digits reconstructs c") {
    for (std::uint64_t c = 1; c < 5000; ++c) {
        const auto d = binary_digits(c);
        REQUIRE_FALSE(d.empty());
        CHECK(d.back() == 1);
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < d.size(); ++i) v += static_cast<std::uint64_t>(d[i]) << i;
        CHECK(v == c);
    }
    CHECK(binary_digits(1000) == std::vector<int>{0, 0, 0, 1, 0, 1, 1, 1, 1, 1});
    CHECK_THROWS_AS(binary_digits(0), InvalidParameter);
}

TEST_CASE("k_binary_approx examples") {
    CHECK(k_binary_approx(1000, 3) == 896);
    CHECK(k_binary_approx(1024, 3) == 1024);
    CHECK(k_binary_approx(7, 3) == 7);
    CHECK(k_binary_approx(13, 2) == 12);
    CHECK((13.0 - 12.0) / 13.0 <= 0.5);
    CHECK(k_binary_approx(UINT64_MAX, 1) == (1ull << 63));
    CHECK_THROWS_AS(k_binary_approx(0, 3), InvalidParameter);
    CHECK_THROWS_AS(k_binary_approx(5, 0), InvalidParameter);
}

TEST_CASE("k_binary_approx agrees with digit truncation") {
    for (std::uint64_t c = 1; c < 20000; ++c) {
        for (unsigned k = 1; k <= 6; ++k) CHECK(k_binary_approx(c, k) == approx_by_digits(c, k));
    }
}

TEST_CASE("k_binary_approx properties") {
    for (std::uint64_t c = 1; c < 70000; c += 7) {
        for (unsigned k = 1; k <= 12; ++k) {
            const auto a = k_binary_approx(c, k);
            CHECK(a <= c);
            CHECK(k_binary_approx(a, k) == a);
            if (c < (1ull << k)) CHECK(a == c);
            CHECK(static_cast<double>(c - a) / static_cast<double>(c) <= std::ldexp(1.0, 1 - static_cast<int>(k)));
        }
    }
}

TEST_CASE("Table 1") {
    const auto net = build_net(1024, 3);
    CHECK(net.elements == kTable1);
    CHECK(net.size() == 36);
    CHECK(net.M == 1024);
    CHECK(net.k == 3);
}

TEST_CASE("build_net matches enumeration of the definition") {
    for (std::uint64_t M : {1, 2, 3, 7, 100, 200, 1000, 1024, 4097}) {
        for (unsigned k = 1; k <= 5; ++k) {
            std::set<std::uint64_t> direct;
            for (std::uint64_t c = 1; c <= M; ++c) direct.insert(k_binary_approx(c, k));
            CHECK(build_net(M, k).elements == std::vector<std::uint64_t>(direct.begin(), direct.end()));
        }
    }
}

TEST_CASE("build_net examples") {
    CHECK(build_net(200, 2).elements ==
          std::vector<std::uint64_t>{1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128, 192});
    CHECK(build_net(100, 2).size() == 13);
    CHECK(build_net(1000, 1).elements == std::vector<std::uint64_t>{1, 2, 4, 8, 16, 32, 64, 128, 256, 512});
    CHECK(build_net(1, 4).elements == std::vector<std::uint64_t>{1});
    CHECK_THROWS_AS(build_net(0, 2), InvalidParameter);
    CHECK_THROWS_AS(build_net(10, 0), InvalidParameter);
}

TEST_CASE("net invariants") {
    for (std::uint64_t M : {5, 64, 200, 999, 12345}) {
        for (unsigned k = 1; k <= 6; ++k) {
            const auto net = build_net(M, k);
            const auto& e = net.elements;
            CHECK(std::is_sorted(e.begin(), e.end()));
            CHECK(std::adjacent_find(e.begin(), e.end()) == e.end());
            CHECK(e.front() >= 1);
            CHECK(e.back() <= M);
            for (auto v : e) CHECK(k_binary_approx(v, k) == v);
            // refinement
            const auto finer = build_net(M, k + 1);
            CHECK(std::includes(finer.elements.begin(), finer.elements.end(), e.begin(), e.end()));
            // Lemma 1 coverage from below
            for (std::uint64_t c = 1; c <= std::min<std::uint64_t>(M, 3000); ++c) {
                const auto below = neighbor(net, c, NeighborMode::Below);
                REQUIRE(below.has_value());
                CHECK(*below <= c);
                CHECK(static_cast<double>(c - *below) / static_cast<double>(c) <=
                      std::ldexp(1.0, 1 - static_cast<int>(k)));
            }
        }
    }
}

TEST_CASE("net size grows like (log2 M)^2") {
    double worst = 0.0;
    for (std::uint64_t M = 4; M <= 1'000'000; M = M * 3 / 2 + 1) {
        const double L = std::log2(static_cast<double>(M));
        const auto k = static_cast<unsigned>(std::floor(std::log2(L))) + 1;
        worst = std::max(worst, static_cast<double>(build_net(M, k).size()) / (L * L));
    }
    MESSAGE("max |S_k(M)| / (log2 M)^2 = " << worst);
    CHECK(worst <= 2.0);
}

TEST_CASE("default_k") {
    CHECK(default_k(200) == 2);
    CHECK(default_k(100) == 2);
    CHECK(default_k(1024) == 3);
    CHECK(default_k(2) == 1);
    CHECK(default_k(3) == 1);
    CHECK(default_k(15) == 1);
    CHECK(default_k(16) == 2);
    CHECK(default_k(255) == 2);
    CHECK(default_k(256) == 3);
    CHECK(default_k(65535) == 3);
    CHECK(default_k(65536) == 4);
    CHECK(default_k(UINT64_MAX) == 5);
    for (std::uint64_t M = 3; M < 200000; M += 97) {
        const auto expect = std::max(1, static_cast<int>(std::floor(std::log2(std::log2(static_cast<double>(M))))));
        CHECK(default_k(M) == static_cast<unsigned>(expect));
    }
    CHECK_THROWS_AS(default_k(1), InvalidParameter);
    CHECK_THROWS_AS(default_k(0), InvalidParameter);
}

TEST_CASE("neighbor") {
    const auto net = build_net(200, 2);
    CHECK(neighbor(net, 10, NeighborMode::Below) == 8u);
    CHECK(neighbor(net, 10, NeighborMode::Above) == 12u);
    CHECK_FALSE(neighbor(net, 192, NeighborMode::Above).has_value());
    CHECK(neighbor(net, 192, NeighborMode::Below) == 192u);
    CHECK(neighbor(net, 200, NeighborMode::Below) == 192u);
    CHECK(neighbor(net, 12, NeighborMode::Above) == 16u);
    CHECK(neighbor(net, 1, NeighborMode::Below) == 1u);
    CHECK(neighbor(build_net(100, 2), 15, NeighborMode::Above) == 16u);
}

TEST_CASE("to_binary") {
    CHECK(to_binary(1024, 11) == "10000000000");
    CHECK(to_binary(7, 11) == "00000000111");
    CHECK(to_binary(5, 3) == "101");
}
