#include <doctest.h>

#include "bergman/quadrature.hpp"
#include "test_util.hpp"

#include <cmath>
#include <numbers>

using namespace bergman;
using bergman::testing::random_point;

namespace {

BallIntegrand smooth(std::function<double(const CVec&)> f) {
    BallIntegrand g;
    g.f = std::move(f);
    return g;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("gauss legendre integrates polynomials exactly") {
    for (int count : {1, 2, 5, 12, 48}) {
        const Rule1D r = gauss_legendre(count, 0.0, 2.0);
        for (int k = 0; k < 2 * count; ++k) {
            double s = 0.0;
            for (int i = 0; i < count; ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
            CHECK(s == doctest::Approx(std::pow(2.0, k + 1) / (k + 1)).epsilon(1e-13));
        }
    }
}

TEST_CASE("gauss jacobi matches beta integrals") {
    for (double alpha : {-0.5, 0.0, 1.0, 2.5}) {
        const Rule1D r = gauss_jacobi_unit(20, alpha);
        for (int k = 0; k < 30; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < r.nodes.size(); ++i)
                s += r.weights[i] * std::pow(r.nodes[i], k);
            const double beta = std::exp(std::lgamma(k + 1.0) + std::lgamma(alpha + 1.0) -
                                         std::lgamma(k + alpha + 2.0));
            CHECK(s == doctest::Approx(beta).epsilon(1e-12));
        }
    }
}

TEST_CASE("ball rule weights sum to the volume") {
    for (int n = 1; n <= 2; ++n) {
        for (double r : {0.3, 0.7, 0.9}) {
            const auto q = ball_rule(n, r);
            double s = 0.0;
            for (double w : q.weights) {
                CHECK(w > 0.0);
                s += w;
            }
            CHECK(rel_err(s, ball_volume(n, r)) < 1e-10);
            for (const CVec& x : q.nodes) CHECK(x.norm() < r);
        }
    }
}

TEST_CASE("quad_ball of one matches the volume") {
    std::mt19937_64 rng(3);
    for (int n = 1; n <= 2; ++n) {
        for (double r : {0.2, 0.5, 0.7, 0.9}) {
            const BallPoint c = random_point(n, rng, 0.8);
            const auto res = quad_ball(smooth([](const CVec&) { return 1.0; }), c, r);
            CHECK(rel_err(res.value, ball_volume(n, r)) < 1e-6);
        }
    }
    BallRuleSpec spec;
    spec.mc_samples = 100000;
    const auto res = quad_ball(smooth([](const CVec&) { return 1.0; }),
                               BallPoint{cd(0.1), cd(0.2), cd(-0.1)}, 0.6, spec);
    CHECK(res.std_error > 0.0);
    CHECK(std::abs(res.value - ball_volume(3, 0.6)) < 3.0 * res.std_error);
}

TEST_CASE("mean value equality for pluriharmonic functions") {
    std::mt19937_64 rng(4);
    const std::vector<std::function<double(const CVec&)>> bank{
        [](const CVec& z) { return z[0].real(); },
        [](const CVec& z) { return (z[0] * z[z.size() - 1]).real(); },
        [](const CVec& z) { return (z[0] * z[0] * z[0]).real(); },
    };
    for (int n = 1; n <= 2; ++n) {
        for (int k = 0; k < 4; ++k) {
            const BallPoint c = random_point(n, rng, 0.7);
            const double r = 0.3 + 0.15 * k;
            for (const auto& f : bank) {
                const double avg = ball_average(smooth(f), c, r);
                CHECK(std::abs(avg - f(c.coords())) < 1e-6 * std::max(1.0, std::abs(f(c.coords()))));
            }
        }
    }
}

TEST_CASE("sub mean value inequality") {
    std::mt19937_64 rng(5);
    for (int n = 1; n <= 2; ++n) {
        for (int k = 0; k < 5; ++k) {
            const BallPoint c = random_point(n, rng, 0.7);
            auto f = [](const CVec& z) { return z.squaredNorm(); };
            CHECK(ball_average(smooth(f), c, 0.5) >= f(c.coords()));
            auto g = [](const CVec& z) { return -std::log(1.0 - z.squaredNorm()); };
            CHECK(ball_average(smooth(g), c, 0.5) >= g(c.coords()));
        }
    }
}

TEST_CASE("doubling the node count leaves smooth integrals unchanged") {
    const BallPoint c{cd(0.3, -0.2), cd(0.1, 0.4)};
    auto f = [](const CVec& z) { return std::cos(3.0 * z[0].real()) * std::exp(z[1].imag()); };
    const double a = quad_ball(smooth(f), c, 0.6).value;
    BallRuleSpec fine;
    fine.radial = -2;
    fine.angular = -2;
    const double b = quad_ball(smooth(f), c, 0.6, fine).value;
    CHECK(std::abs(a - b) < 1e-8 * std::abs(b));
    const BallPoint c1{cd(0.5, 0.2)};
    const double a1 = quad_ball(smooth(f), c1, 0.8).value;
    const double b1 = quad_ball(smooth(f), c1, 0.8, fine).value;
    CHECK(std::abs(a1 - b1) < 1e-8 * std::abs(b1));
}

TEST_CASE("log singularity: the green ball mean in one variable") {
    // Mean of G(·, y) over E(c, r) equals the closed form at t = |F_c(y)|².
    std::mt19937_64 rng(6);
    for (int k = 0; k < 20; ++k) {
        const BallPoint c = random_point(1, rng, 0.7);
        const BallPoint y = random_point(1, rng, 0.7);
        const double r = 0.6;
        const DefiningPolynomial T(Polynomial::coordinate(1, 0, y[0]));
        BallIntegrand g;
        g.f = [&](const CVec& x) { return green(BallPoint(x), y); };
        g.singular = {&T, green_constant(1)};
        const double avg = ball_average(g, c, r);
        const double t = pseudo_distance(c, y) * pseudo_distance(c, y);
        CHECK(std::abs(avg - green_ball_mean(1, r, t)) < 1e-9);
    }
}

TEST_CASE("log singularity along a hyperplane in two variables") {
    // The mean of log|z2 − b|² over E(c, r) against the Bergman measure has no
    // closed form in general, but is independent of the defining function:
    // T and T·e^{z1} give averages differing by the mean of 2 Re z1 = 2 Re c1.
    const BallPoint c{cd(0.2, 0.1), cd(0.1, -0.3)};
    const DefiningPolynomial T(Polynomial::coordinate(2, 1, cd(0.15, 0.0)));
    BallIntegrand g;
    g.f = [&](const CVec& x) { return T.log_abs2(x); };
    g.singular = {&T, 1.0};
    const double a = ball_average(g, c, 0.6);
    BallRuleSpec fine;
    fine.radial = -2;
    fine.angular = -2;
    const double b = ball_average(g, c, 0.6, fine);
    CHECK(std::abs(a - b) < 1e-8);
    const DefiningPolynomial Te = T.times_exp(Polynomial::coordinate(2, 0));
    BallIntegrand ge;
    ge.f = [&](const CVec& x) { return Te.log_abs2(x); };
    ge.singular = {&Te, 1.0};
    CHECK(std::abs(ball_average(ge, c, 0.6) - a - 2.0 * c[0].real()) < 1e-8);
}

TEST_CASE("non-integrable singularity reports its location") {
    BallIntegrand g;
    g.f = [](const CVec& x) { return x[0].real() > 0.1 ? INFINITY : 0.0; };
    bool thrown = false;
    try {
        quad_ball(g, BallPoint::origin(1), 0.5);
    } catch (const QuadratureError& e) {
        thrown = true;
        CHECK(e.location()[0].real() > 0.1);
    }
    CHECK(thrown);
}

TEST_CASE("line roots locate zeros along a pulled-back line") {
    const BallPoint c{cd(0.3, 0.1), cd(-0.2, 0.2)};
    const MobiusMap F(c);
    const Polynomial P = Polynomial::coordinate(2, 1, cd(0.1)) *
                         Polynomial::coordinate(2, 1, cd(-0.2, 0.1));
    CVec base(2), dir(2);
    base << cd(0.1, 0.05), cd(0.0);
    dir << cd(0.0), cd(1.0);
    const auto roots = line_roots(P, F, base, dir);
    REQUIRE(roots.size() == 2);
    for (cd s : roots) CHECK(std::abs(P(F(base + s * dir))) < 1e-12);
}

TEST_CASE("nearest zero in the chart") {
    const DefiningPolynomial T(Polynomial::coordinate(2, 1));
    CVec c(2);
    c << cd(0.0), cd(0.3);
    const auto y = nearest_zero_in_chart(T, c);
    REQUIRE(y.has_value());
    CHECK(y->norm() == doctest::Approx(0.3).epsilon(1e-12));
}
