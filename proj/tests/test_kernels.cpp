#include <doctest.h>

#include "bergman/kernels.hpp"

#include <bit>
#include <cstdint>
#include <random>
#include <vector>

using namespace bergman::kernels;

namespace {

std::vector<double> random_vec(std::size_t len, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(len);
    for (double& x : v) x = u(rng) * std::exp(10.0 * u(rng));
    return v;
}

bool same_bits(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

}  // namespace

TEST_CASE("scalar sum of small arrays") {
    std::vector<double> v{1.0, 2.0, 3.0, 4.0, 5.0};
    CHECK(sum(v, Isa::scalar) == 15.0);
    std::vector<double> w{1.0, 0.5, 0.0, 2.0, 1.0};
    CHECK(weighted_sum(v, w, Isa::scalar) == doctest::Approx(1.0 + 1.0 + 8.0 + 5.0));
    CHECK(sum(std::vector<double>{}, Isa::scalar) == 0.0);
}

TEST_CASE("pairwise sum is accurate on a long ill-conditioned array") {
    std::vector<double> v(1 << 20, 0.1);
    CHECK(sum(v, Isa::scalar) == doctest::Approx(0.1 * (1 << 20)).epsilon(1e-14));
}

TEST_CASE("weighted_cdot conjugates the first argument") {
    std::vector<double> are{0.0}, aim{1.0}, bre{0.0}, bim{1.0}, w{2.0};
    const auto z = weighted_cdot(are, aim, bre, bim, w, Isa::scalar);
    CHECK(z.real() == 2.0);
    CHECK(z.imag() == 0.0);
}

TEST_CASE("avx2 kernels are bit-identical to scalar") {
    if (avx2_leaves() == nullptr || !cpu_has_avx2()) {
        MESSAGE("AVX2 variant unavailable; skipped");
        return;
    }
    std::mt19937_64 rng(7);
    for (std::size_t len : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 255u, 256u, 257u, 1000u, 4099u, 65537u}) {
        const auto a = random_vec(len, rng), b = random_vec(len, rng), c = random_vec(len, rng),
                   d = random_vec(len, rng), w = random_vec(len, rng);
        CHECK(same_bits(sum(a, Isa::scalar), sum(a, Isa::avx2)));
        CHECK(same_bits(weighted_sum(a, w, Isa::scalar), weighted_sum(a, w, Isa::avx2)));
        const auto zs = weighted_cdot(a, b, c, d, w, Isa::scalar);
        const auto zv = weighted_cdot(a, b, c, d, w, Isa::avx2);
        CHECK(same_bits(zs.real(), zv.real()));
        CHECK(same_bits(zs.imag(), zv.imag()));
    }
}

TEST_CASE("isa names") {
    CHECK(isa_name(Isa::scalar) == "scalar");
    CHECK(isa_name(Isa::avx2) == "avx2");
}
