#include "bergman/selftest.hpp"

#include "bergman/geometry.hpp"
#include "bergman/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace bergman {

namespace {

BallPoint draw(int n, std::mt19937_64& rng, double radius) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    CVec z(n);
    for (int i = 0; i < n; ++i) z[i] = cd(g(rng), g(rng));
    z *= radius * std::pow(u(rng), 1.0 / (2 * n)) / z.norm();
    return BallPoint(z);
}

}  // namespace

std::vector<SelfCheck> geometry_selftest(std::uint64_t seed) {
    std::vector<SelfCheck> out;
    auto record = [&](std::string name, double value, double tol) {
        out.push_back({std::move(name), value, tol, value <= tol});
    };
    std::mt19937_64 rng(seed);
    for (int n = 1; n <= 3; ++n) {
        double inv = 0.0, origin = 0.0, ident = 0.0;
        for (int t = 0; t < 1000; ++t) {
            const BallPoint a = draw(n, rng, 0.99), z = draw(n, rng, 0.99);
            const MobiusMap F(a);
            const CVec w = F(z.coords());
            inv = std::max(inv, (F(w) - z.coords()).norm());
            origin = std::max(origin, (F(CVec::Zero(n)) - a.coords()).norm());
            const double rhs =
                (1.0 - a.norm2()) * (1.0 - z.norm2()) / std::norm(1.0 - inner(z.coords(), a.coords()));
            ident = std::max(ident, std::abs(1.0 - w.squaredNorm() - rhs));
        }
        record("mobius_involution_n" + std::to_string(n), inv, 1e-12);
        record("mobius_origin_n" + std::to_string(n), origin, 1e-12);
        record("mobius_identity_n" + std::to_string(n), ident, 1e-12);
    }
    for (int n = 1; n <= 2; ++n) {
        BallIntegrand one;
        one.f = [](const CVec&) { return 1.0; };
        const double v = quad_ball(one, draw(n, rng, 0.5), 0.7).value;
        record("volume_n" + std::to_string(n), std::abs(v / ball_volume(n, 0.7) - 1.0), 1e-6);
        BallIntegrand re;
        re.f = [](const CVec& z) { return z[0].real(); };
        const BallPoint c = draw(n, rng, 0.5);
        const double x = c.coords()[0].real();
        record("mean_value_n" + std::to_string(n), std::abs(ball_average(re, c, 0.4) - x) / std::max(std::abs(x), 1e-6),
               1e-6);
    }
    double g = 0.0;
    for (int k = 1; k < 100; ++k) {
        const double r = k / 100.0;
        g = std::max(g, std::abs(green_gamma(BallPoint{cd(r, 0.0)}) - std::log(r * r) / (2.0 * std::numbers::pi)));
    }
    record("green_closed_form_n1", g, 1e-12);
    return out;
}

}  // namespace bergman
