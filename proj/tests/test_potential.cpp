#include <doctest.h>

#include "bergman/potential.hpp"
#include "test_util.hpp"

#include <cmath>
#include <numbers>

using namespace bergman;
using bergman::testing::random_point;

namespace {

const double pi = std::numbers::pi;

DefiningPolynomial two_roots() {
    const std::vector<cd> r{cd(0.3, 0.1), cd(-0.2, 0.5)};
    return DefiningPolynomial::from_roots(r);
}

// z2 = 0.1
DefiningPolynomial flat_plane() { return DefiningPolynomial(Polynomial::coordinate(2, 1, 0.1)); }

// z2 − z1² − 0.05
DefiningPolynomial parabola() {
    return DefiningPolynomial(
        Polynomial(2, {Term{{0, 1}, 1.0}, Term{{2, 0}, -1.0}, Term{{0, 0}, -0.05}}));
}

// Point at pseudohyperbolic distance d from z in the direction of a unit vector u.
BallPoint at_distance(const BallPoint& z, const CVec& u, double d) {
    MobiusMap F(z);
    return BallPoint(F(CVec(d * u)));
}

double rel_err(double a, double b) {
    const double m = std::max(std::abs(a), std::abs(b));
    return m < 1e-6 ? std::abs(a - b) : std::abs(a - b) / m;
}

}  // namespace

TEST_CASE("gamma kernel vanishes off E(z, r)") {
    const BallPoint z1{cd(0.2, -0.1)};
    CVec u1(1);
    u1[0] = cd(0.6, 0.8);
    const BallPoint w1 = at_distance(z1, u1, 0.9);
    CHECK(gamma_r_kernel(z1, w1, 0.5) == 0.0);
    CHECK(std::abs(gamma_r_kernel_quad(z1, w1, 0.5).value) < 1e-6);

    const BallPoint z2{cd(0.1, 0.2), cd(-0.3, 0.1)};
    CVec u2(2);
    u2 << cd(0.6, 0.0), cd(0.0, 0.8);
    const BallPoint w2 = at_distance(z2, u2, 0.9);
    CHECK(gamma_r_kernel(z2, w2, 0.5) == 0.0);
    CHECK(std::abs(gamma_r_kernel_quad(z2, w2, 0.5).value) < 1e-6);
    CHECK(gamma_r_kernel(z2, at_distance(z2, u2, 0.5 + 1e-3), 0.5) == 0.0);
}

TEST_CASE("gamma kernel is non-positive and continuous across the support edge") {
    std::mt19937_64 rng(11);
    for (int n = 1; n <= 3; ++n)
        for (int i = 0; i < 2000; ++i) {
            const BallPoint z = random_point(n, rng, 0.9), w = random_point(n, rng, 0.9);
            const double r = 0.1 + 0.8 * (i % 9) / 8.0;
            CHECK(gamma_r_kernel(z, w, r) <= 1e-6);
        }
    const BallPoint z{cd(0.3, 0.0), cd(0.0, 0.2)};
    CVec u(2);
    u << cd(1.0, 0.0), cd(0.0, 0.0);
    CHECK(std::abs(gamma_r_kernel(z, at_distance(z, u, 0.5 - 1e-7), 0.5)) < 1e-9);
}

TEST_CASE("gamma kernel tends to -infinity at the pole") {
    const BallPoint z{cd(0.1, 0.4)};
    CVec u(1);
    u[0] = 1.0;
    double prev = 0.0;
    for (double d : {0.1, 1e-2, 1e-4, 1e-8}) {
        const double g = gamma_r_kernel(z, at_distance(z, u, d), 0.5);
        CHECK(g < prev);
        prev = g;
    }
    CHECK(prev < -2.9);
    CHECK(std::isinf(gamma_r_kernel(z, z, 0.5)));
    CHECK(gamma_r_kernel_quad(z, at_distance(z, u, 1e-7), 0.5).near_pole);
}

TEST_CASE("gamma kernel closed form matches the quadrature route") {
    const BallPoint z{cd(0.2, 0.1)};
    for (cd w : {cd(0.35, -0.05), cd(0.0, 0.3), cd(0.2, 0.12)}) {
        const auto q = gamma_r_kernel_quad(z, BallPoint{w}, 0.5);
        CHECK(std::abs(q.value - gamma_r_kernel(z, BallPoint{w}, 0.5)) < 1e-9);
    }
    const BallPoint z2{cd(0.1, 0.2), cd(0.15, 0.0)}, w2{cd(0.2, 0.1), cd(0.1, 0.1)};
    const auto q2 = gamma_r_kernel_quad(z2, w2, 0.5);
    CHECK(std::abs(q2.value - gamma_r_kernel(z2, w2, 0.5)) < 1e-4);
    CHECK(q2.est_error < 1e-4);
}

TEST_CASE("s_r vanishes when W stays outside E(z, r)") {
    const auto T = two_roots();
    const BallPoint z{cd(-0.7, -0.5)};
    REQUIRE(chart_distance(T, z) >= 0.5);
    CHECK(std::abs(s_r_potential(T, z, 0.5)) < 1e-6);
    CHECK(s_r_green(T, z, 0.5) == 0.0);

    const auto P = flat_plane();
    const BallPoint z2{cd(0.1, 0.2), cd(0.7, 0.0)};
    REQUIRE(chart_distance(P, z2) >= 0.5);
    CHECK(std::abs(s_r_potential(P, z2, 0.5)) < 1e-6);
    CHECK(s_r_green(P, z2, 0.5) == 0.0);
}

TEST_CASE("s_r on W is -infinity") {
    const auto T = two_roots();
    CHECK(std::isinf(s_r_potential(T, BallPoint{cd(0.3, 0.1)}, 0.5)));
    CHECK(std::isinf(s_r_green(T, BallPoint{cd(0.3, 0.1)}, 0.5)));
    CHECK(std::isinf(s_r_potential(flat_plane(), BallPoint{cd(0.2, 0.0), cd(0.1, 0.0)}, 0.5)));
}

TEST_CASE("one zero: s_r is 2 pi Gamma_r(z, a)") {
    const cd a(0.3, 0.1);
    const auto T = DefiningPolynomial::from_roots(std::span<const cd>(&a, 1));
    const BallPoint z{cd(0.1, 0.0)};
    const double expect = 2.0 * pi * gamma_r_kernel(z, BallPoint{a}, 0.5);
    CHECK(s_r_green(T, z, 0.5) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(s_r_potential(T, z, 0.5) == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("potential and Green forms agree in one variable") {
    const auto T = two_roots();
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        const BallPoint z = random_point(1, rng, 0.9);
        const double a = s_r_potential(T, z, 0.5), b = s_r_green(T, z, 0.5);
        CHECK(rel_err(a, b) < 1e-3);
        CHECK(a <= 1e-9);
        CHECK(b <= 1e-9);
    }
}

TEST_CASE("potential and Green forms agree for a hyperplane and a curved W") {
    std::mt19937_64 rng(6);
    for (const auto& T : {flat_plane(), parabola()}) {
        for (int i = 0; i < 12; ++i) {
            const BallPoint z = random_point(2, rng, 0.8);
            const double a = s_r_potential(T, z, 0.4), b = s_r_green(T, z, 0.4);
            CHECK(rel_err(a, b) < 1e-3);
            CHECK(a <= 1e-9);
        }
    }
}

TEST_CASE("s_r is unchanged by a zero-free multiplier") {
    const auto T = flat_plane();
    const auto U = T.times_exp(Polynomial(2, {Term{{1, 1}, cd(0.3, -0.2)}, Term{{2, 0}, 0.5}}));
    const BallPoint z{cd(0.2, -0.1), cd(0.2, 0.1)};
    CHECK(std::abs(s_r_potential(T, z, 0.5) - s_r_potential(U, z, 0.5)) < 1e-8);
}

TEST_CASE("Green form reports missing coverage") {
    const auto T = flat_plane();
    const BallPoint z{cd(0.0, 0.0), cd(0.15, 0.0)};
    HypersurfaceSample empty;
    empty.dim = 2;
    CHECK_THROWS_AS(s_r_green(T, empty, z, 0.5), NumericalError);
}

TEST_CASE("s_r has a unit logarithmic singularity along a hyperplane") {
    const auto T = DefiningPolynomial(Polynomial::coordinate(2, 1));
    std::vector<BallPoint> approach;
    for (double d : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 1e-4})
        approach.push_back(BallPoint{cd(0.2, 0.1), cd(d, 0.0)});
    const SlopeFit fit = log_singularity_slope(T, approach, 0.5);
    CHECK(std::abs(fit.slope - 1.0) < 0.05);
    for (std::size_t i = 0; i < approach.size(); ++i)
        CHECK(std::abs(fit.s_values[i] - fit.log_delta2[i]) < 5.0);
}

TEST_CASE("s_{r,eps} is non-positive and bounded below near W") {
    const auto T = two_roots();
    const double r = 0.5, eps = 0.1;
    std::mt19937_64 rng(9);
    std::vector<BallPoint> calib, test;
    for (int i = 0; i < 16; ++i) {
        CVec u(1);
        u[0] = std::polar(1.0, 2.0 * pi * std::uniform_real_distribution<double>()(rng));
        const double d = eps * std::uniform_real_distribution<double>(0.01, 0.99)(rng);
        (i % 2 ? test : calib).push_back(at_distance(BallPoint{cd(0.3, 0.1)}, u, d));
    }
    const double C = fit_smoothing_constant(T, r, eps, calib);
    CHECK(std::isfinite(C));
    for (const BallPoint& z : test) {
        const double s = s_r_smooth(T, z, r, eps);
        CHECK(s <= 1e-9);
        CHECK(s >= std::log(eps * eps) - C - 0.5);
    }
    CHECK(s_r_smooth(T, BallPoint{cd(-0.7, -0.5)}, 0.3, eps) <= 1e-9);
}

TEST_CASE("s_{r,eps} tends to s_r off W") {
    const auto T = two_roots();
    const BallPoint z{cd(0.0, 0.0)};
    const double s = s_r_potential(T, z, 0.5);
    double prev = 1.0;
    for (double eps : {0.1, 0.05, 0.025}) {
        const double gap = std::abs(s_r_smooth(T, z, 0.5, eps) - s);
        CHECK(gap < 2.0 * eps);
        CHECK(gap < prev);
        prev = gap;
    }
    CHECK_THROWS_AS(s_r_smooth(T, z, 0.5, 0.3), DomainError);
}

TEST_CASE("flux of d^c s_r around a zero is one minus the enclosed Upsilon mass") {
    const auto T = two_roots();
    const double r = 0.5, rho = 0.15, h = 1e-4;
    const cd a(0.3, 0.1);
    const int m = 64;
    double flux = 0.0;
    for (int j = 0; j < m; ++j) {
        const cd e = std::polar(1.0, 2.0 * pi * j / m);
        const double dn = (s_r_potential(T, BallPoint{a + (rho + h) * e}, r) -
                           s_r_potential(T, BallPoint{a + (rho - h) * e}, r)) /
                          (2.0 * h);
        flux += 0.5 * dn * rho * 2.0 * pi / m;
    }
    flux /= 2.0 * pi;

    // Υ_11 = 2π N(z) g_B(z) / V_1(r) with N(z) the zeros in E(z, r).
    const std::vector<cd> zeros{cd(0.3, 0.1), cd(-0.2, 0.5)};
    const Rule1D rad = gauss_legendre(40, 0.0, rho);
    double mass = 0.0;
    for (std::size_t i = 0; i < rad.nodes.size(); ++i)
        for (int j = 0; j < m; ++j) {
            const cd z = a + rad.nodes[i] * std::polar(1.0, 2.0 * pi * (j + 0.5) / m);
            int N = 0;
            for (cd b : zeros)
                N += pseudo_distance(BallPoint{z}, BallPoint{b}) < r ? 1 : 0;
            const double gB = 2.0 / std::pow(1.0 - std::norm(z), 2);
            mass += 2.0 * (2.0 * pi * N * gB / ball_volume(1, r)) * rad.weights[i] * rad.nodes[i] *
                    2.0 * pi / m;
        }
    const double expect = 1.0 - mass / (2.0 * pi);
    CHECK(expect < 0.97);
    CHECK(std::abs(flux - expect) < 0.02 * std::abs(expect));
}
