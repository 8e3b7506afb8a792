#include <doctest.h>

#include "bergman/hypersurface.hpp"
#include "test_util.hpp"

#include <cmath>
#include <numbers>

using namespace bergman;
using bergman::testing::random_point;

namespace {

const double pi = std::numbers::pi;

DefiningPolynomial parabola(double lambda) {
    // z2 − λ z1²
    return DefiningPolynomial(Polynomial(2, {Term{{0, 1}, 1.0}, Term{{2, 0}, -lambda}}));
}

DefiningPolynomial slice() { return DefiningPolynomial(Polynomial::coordinate(2, 1)); }

// ω_B mass of the slice {z2 = 0} inside B(0, R): 2·3·π R²/(1 − R²).
double slice_area(double R) { return 6.0 * pi * R * R / (1.0 - R * R); }

// Brute-force min over w1 of |F_z((w1, 0))| by grid search and zooming.
double brute_slice_distance(const BallPoint& z) {
    double best = INFINITY;
    cd center{0.0, 0.0};
    double half = 1.0;
    for (int level = 0; level < 12; ++level) {
        cd best_w = center;
        for (int i = -20; i <= 20; ++i)
            for (int j = -20; j <= 20; ++j) {
                const cd w = center + half * cd(i / 20.0, j / 20.0);
                if (std::abs(w) >= 1.0) continue;
                CVec x(2);
                x << w, 0.0;
                const double d = pseudo_distance(z.coords(), x);
                if (d < best) {
                    best = d;
                    best_w = w;
                }
            }
        center = best_w;
        half /= 8.0;
    }
    return best;
}

}  // namespace

TEST_CASE("sample of a point divisor") {
    const std::vector<cd> roots{cd(0.4)};
    const auto s = sample_W(DefiningPolynomial::from_roots(roots), 0.9, 10, 1);
    REQUIRE(s.size() == 1);
    CHECK(std::abs(s.points[0][0] - cd(0.4)) < 1e-15);
    CHECK(s.area_weights[0] == 1.0);
}

TEST_CASE("slice samples lie on the slice and carry its area") {
    const auto T = slice();
    const auto s = sample_W(T, 0.5, 4000, 7);
    CHECK_FALSE(s.sparse);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(std::abs(s.points[i][1]) < 1e-12);
        CHECK(s.area_weights[i] > 0.0);
        const CVec t = s.frames[i].col(0);
        CHECK(bergman_metric(s.points[i])(t) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(s.total_area() == doctest::Approx(slice_area(0.5)).epsilon(5e-3));
}

TEST_CASE("curved surface: residuals and area self-convergence") {
    const auto T = parabola(0.8);
    const auto coarse = sample_W(T, 0.5, 2000, 3);
    const auto fine = sample_W(T, 0.5, 8000, 4);
    for (const auto& p : fine.points) CHECK(std::abs(T(p.coords())) < 1e-10);
    CHECK(std::abs(coarse.total_area() / fine.total_area() - 1.0) < 0.01);
}

TEST_CASE("patch sample integrates exactly on a slice") {
    const auto T = slice();
    for (double r : {0.3, 0.6, 0.8}) {
        const auto s = sample_W_patch(T, BallPoint::origin(2), r);
        CHECK(s.total_area() == doctest::Approx(slice_area(r)).epsilon(1e-10));
    }
    // Off-center: W ∩ E(z, r) is a disk of pseudoradius sqrt(r² − δ²) around the foot.
    const BallPoint z{cd(0.2, 0.1), cd(0.3, -0.1)};
    const double d2 = std::norm(z[1]) / (1.0 - std::norm(z[0]));
    const double r = 0.6;
    const double rho2 = (r * r - d2) / (1.0 - d2);
    const auto s = sample_W_patch(T, z, r);
    for (const auto& p : s.points) CHECK(pseudo_distance(z, p) < r);
    CHECK(s.total_area() == doctest::Approx(6.0 * pi * rho2 / (1.0 - rho2)).epsilon(1e-8));
}

TEST_CASE("patch sample agrees with the global sample on a curved surface") {
    const auto T = parabola(0.5);
    const BallPoint z{cd(0.1), cd(0.05, 0.02)};
    const auto patch = sample_W_patch(T, z, 0.5);
    const auto global = sample_W(T, 0.95, 60000, 9);
    double in_ball = 0.0;
    for (std::size_t i = 0; i < global.size(); ++i)
        if (pseudo_distance(z, global.points[i]) < 0.5) in_ball += global.area_weights[i];
    CHECK(patch.total_area() == doctest::Approx(in_ball).epsilon(0.01));
}

TEST_CASE("distance to W") {
    const std::vector<cd> zero{cd(0.0)};
    const auto T1 = DefiningPolynomial::from_roots(zero);
    const auto s1 = sample_W(T1, 0.9, 1, 0);
    const BallPoint z1{cd(0.3, 0.4)};
    CHECK(dist_to_W(z1, T1, s1).distance == doctest::Approx(0.5).epsilon(1e-14));

    const auto T = slice();
    const auto s = sample_W(T, 0.9, 500, 2);
    CHECK(dist_to_W(BallPoint{cd(0.0), cd(0.3)}, T, s).distance ==
          doctest::Approx(0.3).epsilon(1e-12));
    CHECK(dist_to_W(BallPoint{cd(0.4, 0.1), cd(0.0)}, T, s).distance < 1e-8);

    std::mt19937_64 rng(21);
    for (int k = 0; k < 20; ++k) {
        const BallPoint z = random_point(2, rng, 0.8);
        const auto fp = dist_to_W(z, T, s);
        const double closed = std::abs(z[1]) / std::sqrt(1.0 - std::norm(z[0]));
        CHECK(fp.distance == doctest::Approx(closed).epsilon(1e-10));
        CHECK(std::abs(fp.distance - brute_slice_distance(z)) < 1e-6);
        for (const auto& w : s.points) CHECK(fp.distance <= pseudo_distance(z, w) + 1e-15);
    }
}

TEST_CASE("foot points are unique near a flat surface") {
    const auto T = parabola(0.3);
    const auto s = sample_W(T, 0.9, 2000, 5);
    std::mt19937_64 rng(22);
    for (int k = 0; k < 10; ++k) {
        const BallPoint w = s.points[k * 37 % s.size()];
        // Push off W along the Euclidean normal.
        CVec nrm = T.gradient(w.coords()).conjugate();
        nrm /= nrm.norm();
        const BallPoint z(w.coords() + 0.05 * (1.0 - w.norm2()) * nrm);
        const auto fp = dist_to_W(z, T, s, 16);
        CHECK(fp.multiplicity == 1);
        CHECK_FALSE(fp.approximate);
    }
}

TEST_CASE("tube membership") {
    const std::vector<cd> zero{cd(0.0)};
    const auto T1 = DefiningPolynomial::from_roots(zero);
    const auto s1 = sample_W(T1, 0.9, 1, 0);
    CHECK_FALSE(tube_membership(BallPoint{cd(0.5)}, T1, s1, 0.4));
    CHECK(tube_membership(BallPoint{cd(0.0)}, T1, s1, 1e-9));
    const auto T = parabola(0.5);
    const auto s = sample_W(T, 0.9, 1000, 6);
    int flips = 0;
    bool prev = true;
    for (double t = 0.0; t < 0.6; t += 1e-3) {
        const BallPoint z{cd(0.2), cd(0.02 + t)};
        const bool in = tube_membership(z, T, s, 0.25);
        if (in != prev) ++flips;
        prev = in;
    }
    CHECK(flips == 1);
}

TEST_CASE("flatness profile") {
    CHECK(flatness_profile(slice(), BallPoint::origin(2), 0.1).C < 1e-6);
    for (double lambda : {0.2, 0.7}) {
        const auto rep = flatness_profile(parabola(lambda), BallPoint::origin(2), 0.05);
        CHECK_FALSE(rep.violation);
        CHECK(rep.C == doctest::Approx(lambda).epsilon(0.1));
    }
    // An affine hyperplane stays flat from any of its points.
    const DefiningPolynomial H(Polynomial(2, {Term{{1, 0}, cd(0.3, 0.1)}, Term{{0, 1}, 1.0},
                                             Term{{0, 0}, cd(-0.2)}}));
    const auto s = sample_W(H, 0.8, 200, 8);
    for (std::size_t i = 0; i < s.size(); i += 40)
        CHECK(flatness_profile(H, s.points[i], 0.1).C < 1e-6);
    const DefiningPolynomial H3(Polynomial(3, {Term{{1, 0, 0}, 0.5}, Term{{0, 0, 1}, 1.0}}));
    CHECK(flatness_profile(H3, BallPoint{cd(0.2), cd(0.3), cd(-0.1)}, 0.1).C < 1e-6);
}
