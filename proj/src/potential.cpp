#include "bergman/potential.hpp"

#include <cmath>
#include <limits>

namespace bergman {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_radius(double r, const char* who) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError(std::string(who) + ": radius must lie in (0, 1)");
}

double kernel_from_t(int n, double t, double r) {
    if (t >= r * r) return 0.0;
    if (t <= 0.0) return -kInf;
    return green_profile(n, t) - green_ball_mean(n, r, t);
}

// Euclidean radius of a Euclidean ball centred at 0 containing E(z, r).
double enclosing_radius(const BallPoint& z, double r) {
    const double a = z.norm();
    return (a + r) / (1.0 + a * r);
}

}  // namespace

std::string_view method_name(PotentialMethod m) {
    return m == PotentialMethod::potential_form ? "potential_form" : "green_form";
}

double gamma_r_kernel(const BallPoint& z, const BallPoint& zeta, double r) {
    if (z.dim() != zeta.dim()) throw DomainError("gamma_r_kernel: dimension mismatch");
    check_radius(r, "gamma_r_kernel");
    const double d = pseudo_distance(z.coords(), zeta.coords());
    return kernel_from_t(z.dim(), d * d, r);
}

KernelEstimate gamma_r_kernel_quad(const BallPoint& z, const BallPoint& zeta, double r,
                                   const BallRuleSpec& spec) {
    if (z.dim() != zeta.dim()) throw DomainError("gamma_r_kernel_quad: dimension mismatch");
    check_radius(r, "gamma_r_kernel_quad");
    const int n = z.dim();
    KernelEstimate est;
    const double d = pseudo_distance(z.coords(), zeta.coords());
    est.near_pole = d < kPoleExclusion;

    std::optional<DefiningPolynomial> pole_poly;
    BallIntegrand g;
    g.f = [&zeta](const CVec& x) { return green(BallPoint(x), zeta); };
    if (n == 1) {
        const cd a = zeta.coords()[0];
        pole_poly.emplace(DefiningPolynomial::from_roots(std::span<const cd>(&a, 1)));
        g.singular = {&*pole_poly, green_constant(1)};
    } else {
        g.pole = zeta.coords();
    }
    const double center = green_profile(n, d * d);
    const double vol = ball_volume(n, r);
    const QuadResult coarse = quad_ball(g, z, r, spec);
    const QuadResult fine = quad_ball(g, z, r, spec.refined(2));
    est.value = center - fine.value / vol;
    est.est_error = std::abs(fine.value - coarse.value) / vol + fine.std_error / vol;
    est.excluded = fine.excluded;
    return est;
}

double chart_distance(const DefiningPolynomial& T, const BallPoint& z) {
    if (T.dim() != z.dim()) throw DomainError("chart_distance: dimension mismatch");
    double best = kInf;
    for (const Polynomial& P : T.factors()) {
        if (P.degree() == 0) continue;
        if (z.dim() == 1) {
            for (const cd& a : polynomial_roots(P.coefficients_in(0, CVec::Zero(1)))) {
                if (std::abs(a) >= 1.0) continue;
                CVec av(1);
                av[0] = a;
                best = std::min(best, pseudo_distance(z.coords(), av));
            }
        } else if (auto y = nearest_zero_in_chart(DefiningPolynomial(P), z.coords())) {
            best = std::min(best, y->norm());
        }
    }
    return best;
}

double s_r_potential(const DefiningPolynomial& T, const BallPoint& z, double r,
                     const BallRuleSpec& spec) {
    check_radius(r, "s_r_potential");
    if (T.is_constant()) return 0.0;
    const double here = T.log_abs2(z.coords());
    if (!std::isfinite(here) || chart_distance(T, z) < kOnWDistance) return -kInf;
    return here - averaged_potential(T, z, r, spec);
}

PotentialSample s_r_potential_sample(const DefiningPolynomial& T, const BallPoint& z, double r,
                                     const BallRuleSpec& spec) {
    PotentialSample s{z, r, s_r_potential(T, z, r, spec), PotentialMethod::potential_form, 0.0};
    if (std::isfinite(s.s_r_value) && !T.is_constant())
        s.est_error = std::abs(s.s_r_value - s_r_potential(T, z, r, spec.refined(2)));
    return s;
}

double s_r_green(const DefiningPolynomial& T, const HypersurfaceSample& sample, const BallPoint& z,
                 double r) {
    if (T.dim() != z.dim()) throw DomainError("s_r_green: dimension mismatch");
    check_radius(r, "s_r_green");
    const int n = z.dim();
    double sum = 0.0;
    std::size_t inside = 0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double d = pseudo_distance(z.coords(), sample.points[i].coords());
        if (d >= r) continue;
        ++inside;
        if (d < kOnWDistance) return -kInf;
        sum += sample.area_weights[i] * kernel_from_t(n, d * d, r);
    }
    if (inside == 0) {
        if (chart_distance(T, z) < r)
            throw NumericalError("s_r_green: sample does not reach W inside E(z, r)");
        return 0.0;
    }
    return kTwoPi * sum;
}

double s_r_green(const DefiningPolynomial& T, const BallPoint& z, double r) {
    check_radius(r, "s_r_green");
    if (T.is_constant()) return 0.0;
    if (chart_distance(T, z) < kOnWDistance) return -kInf;
    if (z.dim() <= 2) return s_r_green(T, sample_W_patch(T, z, r), z, r);
    return s_r_green(T, sample_W(T, enclosing_radius(z, r), 200000, 20240607), z, r);
}

PotentialSample s_r_green_sample(const DefiningPolynomial& T, const BallPoint& z, double r) {
    PotentialSample s{z, r, s_r_green(T, z, r), PotentialMethod::green_form, 0.0};
    if (std::isfinite(s.s_r_value) && z.dim() == 2 && !T.is_constant()) {
        const double fine = s_r_green(T, sample_W_patch(T, z, r, 16, 64), z, r);
        s.est_error = std::abs(fine - s.s_r_value);
    }
    return s;
}

double s_r_smooth(const DefiningPolynomial& T, const BallPoint& z, double r, double eps,
                  const SmoothingOptions& opt) {
    check_radius(r, "s_r_smooth");
    if (!(eps > 0.0 && eps <= 0.2)) throw DomainError("s_r_smooth: eps must lie in (0, 0.2]");
    if (T.dim() != z.dim()) throw DomainError("s_r_smooth: dimension mismatch");
    if (T.is_constant()) return 0.0;
    const int n = z.dim();
    BallRuleSpec outer = opt.outer, inner = opt.inner;
    if (outer.radial == 0) outer.radial = n == 1 ? 24 : 4;
    if (outer.angular == 0) outer.angular = n == 1 ? 24 : 6;
    if (inner.radial == 0) inner.radial = n == 1 ? 24 : 16;
    if (inner.angular == 0) inner.angular = n == 1 ? 24 : 16;
    BallIntegrand g;
    g.f = [&](const CVec& x) {
        return T.log_abs2(x) - averaged_potential(T, BallPoint(x), r, inner);
    };
    g.singular = {&T, 1.0};
    return ball_average(g, z, eps, outer);
}

double fit_smoothing_constant(const DefiningPolynomial& T, double r, double eps,
                              const std::vector<BallPoint>& calibration,
                              const SmoothingOptions& opt) {
    if (calibration.empty()) throw DomainError("fit_smoothing_constant: empty calibration set");
    double c = -kInf;
    for (const BallPoint& z : calibration)
        c = std::max(c, std::log(eps * eps) - s_r_smooth(T, z, r, eps, opt));
    return c;
}

SlopeFit log_singularity_slope(const DefiningPolynomial& T, const std::vector<BallPoint>& approach,
                               double r, const BallRuleSpec& spec) {
    if (approach.size() < 2) throw DomainError("log_singularity_slope: need two points");
    SlopeFit fit;
    for (const BallPoint& z : approach) {
        const double d = chart_distance(T, z);
        const double s = s_r_potential(T, z, r, spec);
        if (!std::isfinite(d) || !std::isfinite(s))
            throw NumericalError("log_singularity_slope: point on W or W out of reach");
        fit.log_delta2.push_back(std::log(d * d));
        fit.s_values.push_back(s);
    }
    const double m = static_cast<double>(approach.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < approach.size(); ++i) {
        const double x = fit.log_delta2[i], y = fit.s_values[i];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / m;
    return fit;
}

}  // namespace bergman
