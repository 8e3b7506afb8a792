#include <doctest.h>

#include "bergman/geometry.hpp"
#include "test_util.hpp"

#include <cmath>
#include <numbers>

using namespace bergman;
using bergman::testing::random_point;

TEST_CASE("mobius examples") {
    const BallPoint a{cd(0.5)};
    const MobiusMap m(a);
    CHECK(std::abs(mobius_apply(m, BallPoint{cd(0.3)})[0] - cd(0.2 / 0.85)) < 1e-15);
    CHECK(std::abs(mobius_apply(m, BallPoint{cd(0.3)})[0].real() - 0.235294) < 1e-6);
    CHECK((mobius_apply(m, BallPoint::origin(1)).coords() - a.coords()).norm() < 1e-15);

    const BallPoint z{cd(0.1, 0.2), cd(-0.3, 0.05)};
    const MobiusMap m0(BallPoint::origin(2));
    CHECK((mobius_apply(m0, z).coords() + z.coords()).norm() == 0.0);
    CHECK_THROWS_AS(BallPoint({cd(0.8), cd(0.6)}), DomainError);
}

TEST_CASE("mobius involution and norm identity") {
    std::mt19937_64 rng(11);
    for (int n = 1; n <= 3; ++n) {
        for (int k = 0; k < 300; ++k) {
            const BallPoint a = random_point(n, rng, 0.95);
            const BallPoint z = random_point(n, rng, 0.95);
            const MobiusMap m(a);
            CHECK((m.P() * m.P() - m.P()).norm() < 1e-14);
            const BallPoint fz = mobius_apply(m, z);
            CHECK((mobius_apply(m, fz).coords() - z.coords()).norm() < 1e-12);
            const double lhs = 1.0 - fz.norm2();
            const double rhs = (1.0 - z.norm2()) * (1.0 - a.norm2()) /
                               std::norm(1.0 - inner(z.coords(), a.coords()));
            CHECK(std::abs(lhs - rhs) < 1e-12);
        }
    }
}

TEST_CASE("pseudo distance") {
    std::mt19937_64 rng(12);
    for (int k = 0; k < 1000; ++k) {
        const int n = 1 + k % 3;
        const BallPoint a = random_point(n, rng, 0.99);
        const BallPoint b = random_point(n, rng, 0.99);
        CHECK(std::abs(pseudo_distance(a, b) - pseudo_distance(b, a)) < 1e-12);
        CHECK(pseudo_distance(a, a) < 1e-7);
        CHECK(std::abs(pseudo_distance(BallPoint::origin(n), b) - b.norm()) < 1e-12);
        CHECK(std::abs(pseudo_distance(a, b) - mobius_apply(MobiusMap(a), b).norm()) < 1e-10);
    }
}

TEST_CASE("bergman metric") {
    const auto H0 = bergman_metric(BallPoint::origin(2));
    CHECK((H0.matrix() - 3.0 * CMat::Identity(2, 2)).norm() < 1e-15);
    const auto H1 = bergman_metric(BallPoint{cd(0.5)});
    CHECK(H1.matrix()(0, 0).real() == doctest::Approx(32.0 / 9.0).epsilon(1e-14));
    std::mt19937_64 rng(13);
    for (int k = 0; k < 50; ++k) {
        const BallPoint z = random_point(3, rng, 0.9);
        const auto H = bergman_metric(z);
        CHECK(H.is_hermitian());
        CHECK(H.eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("bergman metric is invariant under the involutions") {
    std::mt19937_64 rng(14);
    for (int k = 0; k < 200; ++k) {
        const int n = 1 + k % 3;
        const BallPoint a = random_point(n, rng, 0.8);
        const BallPoint z = random_point(n, rng, 0.8);
        const MobiusMap m(a);
        // Finite-difference holomorphic Jacobian as an independent oracle.
        const double h = 1e-6;
        CMat J(n, n);
        for (int j = 0; j < n; ++j) {
            CVec e = CVec::Zero(n);
            e[j] = h;
            J.col(j) = (m(z.coords() + e) - m(z.coords() - e)) / (2.0 * h);
        }
        CHECK((J - m.jacobian(z.coords())).norm() < 1e-6 * (1.0 + J.norm()));
        const CMat Hz = bergman_metric(z).matrix();
        const CMat Hf = bergman_metric(mobius_apply(m, z)).matrix();
        // ω_B(F(z))(Jv, Jv) = ω_B(z)(v, v): H_z = J^T H_F conj(J).
        const CMat pulled = J.transpose() * Hf * J.conjugate();
        CHECK((pulled - Hz).norm() < 1e-8 * Hz.norm());
    }
}

TEST_CASE("volume density and ball volume") {
    CHECK(volume_density(BallPoint::origin(1)) == doctest::Approx(4.0));
    CHECK(volume_density(BallPoint::origin(2)) == doctest::Approx(72.0));
    CHECK(volume_density(BallPoint{cd(0.5)}) / volume_density(1, 0.0) ==
          doctest::Approx(std::pow(0.75, -2.0)));
    CHECK(ball_volume(1, 0.5) == doctest::Approx(4.18879).epsilon(1e-6));
    CHECK(ball_volume(2, 0.0) == 0.0);
    CHECK_THROWS_AS(ball_volume(1, 1.0), DomainError);
    double prev = 0.0;
    for (double r = 0.05; r < 0.99; r += 0.05) {
        CHECK(ball_volume(2, r) > prev);
        prev = ball_volume(2, r);
    }
}

TEST_CASE("green function") {
    const double pi = std::numbers::pi;
    CHECK(green_constant(1) == doctest::Approx(1.0 / (2.0 * pi)));
    for (double t = 0.01; t < 1.0; t += 0.01) {
        const BallPoint z{cd(std::sqrt(t))};
        CHECK(std::abs(green_gamma(z) - std::log(t) / (2.0 * pi)) < 1e-12);
    }
    // In one variable the profile near the sphere is log t/(2π) ≈ −(1 − t)/(2π).
    const double t_edge = std::pow(1.0 - 1e-6, 2.0);
    CHECK(green_profile(1, t_edge) == doctest::Approx(std::log(t_edge) / (2.0 * pi)).epsilon(1e-12));
    for (int n = 2; n <= 3; ++n) CHECK(std::abs(green_profile(n, t_edge)) < 1e-8);
    for (int n = 1; n <= 3; ++n) {
        CHECK(green_profile(n, 1.0) == 0.0);
        CHECK(std::isinf(green_profile(n, 0.0)));
        double prev = -INFINITY;
        for (double t = 1e-4; t < 1.0; t += 0.0173) {
            const double f = green_profile(n, t);
            CHECK(f < 0.0);
            CHECK(f > prev);
            prev = f;
        }
    }
}

TEST_CASE("green profile matches its derivative and is continuous at the switch") {
    for (int n = 1; n <= 3; ++n) {
        for (double t : {0.05, 0.3, 0.49, 0.5, 0.51, 0.7, 0.95, 0.999}) {
            const double h = 1e-6;
            const double fd = (green_profile(n, t + h) - green_profile(n, t - h)) / (2 * h);
            CHECK(fd == doctest::Approx(green_profile_derivative(n, t)).epsilon(1e-6));
        }
        const double below = green_profile(n, 0.5 - 1e-13);
        const double above = green_profile(n, 0.5 + 1e-13);
        CHECK(std::abs(above - below) < 1e-12);
    }
}

TEST_CASE("green function symmetry") {
    std::mt19937_64 rng(15);
    for (int k = 0; k < 300; ++k) {
        const int n = 1 + k % 3;
        const BallPoint a = random_point(n, rng, 0.95);
        const BallPoint b = random_point(n, rng, 0.95);
        CHECK(std::abs(green(a, b) - green(b, a)) < 1e-12);
        CHECK(green(b, BallPoint::origin(n)) == doctest::Approx(green_gamma(b)).epsilon(1e-13));
    }
    const BallPoint a{cd(0.2), cd(0.1)};
    CHECK(std::isinf(green(a, a)));
}
