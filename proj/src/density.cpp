#include "bergman/density.hpp"

#include "bergman/report.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

namespace bergman {

namespace {

constexpr double kPi = std::numbers::pi;

// Forms are evaluated as v^T H conj(v); with u = conj(v) this is u† H^T u.
Eigen::MatrixXcd as_standard(const HermitianForm& f) {
    return Eigen::MatrixXcd(f.symmetrized().matrix().transpose());
}

Eigen::MatrixXcd checked_weight_matrix(const Weight& kappa, const BallPoint& z) {
    const Eigen::MatrixXcd B = as_standard(kappa.hessian(z));
    Eigen::LLT<Eigen::MatrixXcd> llt(B);
    if (llt.info() != Eigen::Success)
        throw DomainError("weight Hessian is not positive definite");
    return B;
}

CVec to_cvec(const Eigen::VectorXcd& v) {
    CVec out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v[i];
    return out;
}

double quotient(const HermitianForm& num, const HermitianForm& den, const CVec& v) {
    return num(v) / den(v);
}

}  // namespace

Weight Weight::log_family(double beta) {
    Weight w;
    w.beta = beta;
    return w;
}

Weight Weight::scaled(double s) const {
    Weight w = *this;
    w.scale *= s;
    return w;
}

double Weight::value(const CVec& z) const {
    const double t = z.squaredNorm();
    double v = -beta * std::log1p(-t) + quartic * t * t;
    if (perturbation) v += 2.0 * (*perturbation)(z).real();
    return scale * v;
}

HermitianForm Weight::hessian(const BallPoint& z) const {
    const int n = z.dim();
    const CVec& c = z.coords();
    const double t = z.norm2();
    CMat H(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cd zz = std::conj(c[i]) * c[j];
            const double d = i == j ? 1.0 : 0.0;
            H(i, j) = beta * ((1.0 - t) * d + zz) / ((1.0 - t) * (1.0 - t)) +
                      quartic * 2.0 * (t * d + zz);
        }
    return HermitianForm(H * scale);
}

double Weight::comparability(const std::vector<BallPoint>& points) const {
    double C = 1.0;
    for (const BallPoint& z : points) {
        const Eigen::MatrixXcd K = checked_weight_matrix(*this, z);
        const Eigen::MatrixXcd W = as_standard(bergman_metric(z));
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(K, W,
                                                                      Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        C = std::max({C, ev.maxCoeff(), 1.0 / ev.minCoeff()});
    }
    return C;
}

nlohmann::json Weight::to_json() const {
    nlohmann::json j;
    j["kind"] = kind == Kind::log_family ? "log_family" : "polynomial_perturbation";
    j["beta"] = beta;
    j["quartic"] = quartic;
    j["scale"] = scale;
    if (perturbation) j["perturbation"] = DefiningPolynomial(*perturbation).to_json();
    return j;
}

double averaged_potential(const DefiningPolynomial& T, const BallPoint& z, double r,
                          const BallRuleSpec& spec) {
    if (T.dim() != z.dim()) throw DomainError("averaged_potential: dimension mismatch");
    if (T.is_constant() && T.exponent().is_zero()) return T.log_abs2(z.coords());
    BallIntegrand g;
    g.f = [&T](const CVec& x) { return T.log_abs2(x); };
    if (!T.is_constant()) g.singular = {&T, 1.0};
    return ball_average(g, z, r, spec);
}

UpsilonResult upsilon(const DefiningPolynomial& T, const BallPoint& z, double r,
                      const UpsilonOptions& opt) {
    const int n = z.dim();
    UpsilonResult res;
    res.form = HermitianForm::zero(n);
    res.step = opt.h;
    if (T.is_constant()) return res;

    BallRuleSpec rule = opt.rule;
    if (n == 2 && rule.radial == 0) rule.radial = 16;
    if (n == 2 && rule.angular == 0) rule.angular = 16;
    const Eigen::MatrixXcd metric = as_standard(bergman_metric(z));
    const double center = averaged_potential(T, z, r, rule);
    for (int attempt = 0; attempt <= opt.max_halvings; ++attempt) {
        const double h = opt.h / std::pow(2.0, attempt);
        // Υ(v, v) = (1/4) Δ_ζ A(z + ζ v), 9-point stencil.
        auto Q = [&](const CVec& v) {
            double edges = 0.0, corners = 0.0;
            for (int a = -1; a <= 1; ++a)
                for (int b = -1; b <= 1; ++b) {
                    if (a == 0 && b == 0) continue;
                    const BallPoint p(CVec(z.coords() + cd(a * h, b * h) * v));
                    const double val = averaged_potential(T, p, r, rule);
                    ((a == 0 || b == 0) ? edges : corners) += val;
                }
            return (4.0 * edges + corners - 20.0 * center) / (6.0 * h * h) / 4.0;
        };
        CMat H = CMat::Zero(n, n);
        for (int k = 0; k < n; ++k) H(k, k) = Q(CVec::Unit(n, k));
        for (int k = 0; k < n; ++k)
            for (int l = k + 1; l < n; ++l) {
                const CVec ek = CVec::Unit(n, k), el = CVec::Unit(n, l);
                const double base = H(k, k).real() + H(l, l).real();
                const double re = 0.5 * (Q(ek + el) - base);
                const double im = 0.5 * (Q(CVec(ek + cd(0.0, 1.0) * el)) - base);
                H(k, l) = cd(re, im);
                H(l, k) = cd(re, -im);
            }
        res.form = HermitianForm(H);
        res.step = h;
        res.retries = attempt;
        res.min_eigenvalue = res.form.eigenvalues().minCoeff();
        res.bergman_trace = metric.ldlt().solve(as_standard(res.form)).trace().real();
        res.fd_failure = res.bergman_trace < -opt.psd_tol;
        if (!res.fd_failure) break;
    }
    return res;
}

HermitianForm density_numerator(const HermitianForm& ups, const BallPoint& z) {
    const int n = z.dim();
    return ups + bergman_metric(z) * (static_cast<double>(n) / (n + 1.0));
}

double local_density(const HermitianForm& ups, const Weight& kappa, const BallPoint& z) {
    const Eigen::MatrixXcd B = checked_weight_matrix(kappa, z);
    const Eigen::MatrixXcd A = as_standard(density_numerator(ups, z));
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(A, B, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

double local_density(const DefiningPolynomial& T, const Weight& kappa, const BallPoint& z,
                     double r, const UpsilonOptions& opt) {
    const auto res = upsilon(T, z, r, opt);
    if (res.fd_failure) throw NumericalError("upsilon: finite differences stayed indefinite");
    return local_density(res.form, kappa, z);
}

CVec top_direction(const HermitianForm& ups, const Weight& kappa, const BallPoint& z) {
    const Eigen::MatrixXcd B = checked_weight_matrix(kappa, z);
    const Eigen::MatrixXcd A = as_standard(density_numerator(ups, z));
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(A, B);
    const Eigen::Index top = z.dim() - 1;
    CVec v = to_cvec(es.eigenvectors().col(top).conjugate());
    return v / v.norm();
}

double theta_density(const HermitianForm& ups, const Weight& kappa, const BallPoint& z,
                     const CVec& v) {
    if (v.norm() == 0.0) throw DomainError("theta_density: zero direction");
    checked_weight_matrix(kappa, z);
    return quotient(density_numerator(ups, z), kappa.hessian(z), v);
}

double theta_density(const DefiningPolynomial& T, const Weight& kappa, const BallPoint& z,
                     double r, const CVec& v, const UpsilonOptions& opt) {
    const auto res = upsilon(T, z, r, opt);
    if (res.fd_failure) throw NumericalError("upsilon: finite differences stayed indefinite");
    return theta_density(res.form, kappa, z, v);
}

std::vector<CVec> sphere_directions(int n, int count, std::uint64_t seed) {
    std::vector<CVec> out;
    if (n == 1) {
        for (int i = 0; i < count; ++i) out.push_back(CVec::Ones(1));
        return out;
    }
    if (n == 2) {
        const double golden = kPi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < count; ++i) {
            const double zc = 1.0 - (2.0 * i + 1.0) / count;
            const double th = std::acos(zc);
            CVec v(2);
            v[0] = std::cos(0.5 * th);
            v[1] = std::polar(std::sin(0.5 * th), golden * i);
            out.push_back(v);
        }
        return out;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < count; ++i) {
        CVec v(n);
        for (int k = 0; k < n; ++k) v[k] = cd(g(rng), g(rng));
        out.push_back(v / v.norm());
    }
    return out;
}

std::vector<CVec> probe_directions(const Weight& kappa, const BallPoint& z, int count,
                                   std::uint64_t seed) {
    const Eigen::MatrixXcd B = checked_weight_matrix(kappa, z);
    // v^T K conj(v) = u† B u with u = conj(v); u = L^{-†} w maps the unit sphere
    // onto the B-unit sphere.
    const Eigen::LLT<Eigen::MatrixXcd> llt(B);
    const Eigen::MatrixXcd L = llt.matrixL();
    std::vector<CVec> out;
    for (const CVec& w : sphere_directions(z.dim(), count, seed)) {
        const Eigen::VectorXcd wv = Eigen::VectorXcd(w);
        const Eigen::VectorXcd u = L.adjoint().triangularView<Eigen::Upper>().solve(wv);
        out.push_back(to_cvec(u.conjugate()));
    }
    return out;
}

std::vector<BallPoint> density_grid(int n, int per_axis, double radius) {
    if (per_axis < 1) throw DomainError("density_grid: need at least one point per axis");
    if (!(radius > 0.0 && radius < 1.0)) throw DomainError("density_grid: radius in (0, 1)");
    const int m = n == 1 ? 2 : n;
    const double S = std::atanh(radius);
    std::vector<double> axis;
    for (int i = 0; i < per_axis; ++i) {
        const double s = per_axis == 1 ? 0.0 : -S + 2.0 * S * i / (per_axis - 1);
        axis.push_back(std::tanh(s) / std::sqrt(static_cast<double>(m)));
    }
    std::vector<BallPoint> grid;
    std::vector<int> idx(m, 0);
    while (true) {
        CVec z = CVec::Zero(n);
        if (n == 1) {
            z[0] = cd(axis[idx[0]], axis[idx[1]]);
        } else {
            for (int k = 0; k < n; ++k) z[k] = axis[idx[k]];
        }
        grid.emplace_back(z);
        int k = 0;
        while (k < m && ++idx[k] == per_axis) idx[k++] = 0;
        if (k == m) break;
    }
    return grid;
}

double linear_extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t m = x.size();
    if (m == 0) throw std::invalid_argument("linear_extrapolate_to_zero: no data");
    if (m == 1) return y[0];
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = m * sxx - sx * sx;
    const double slope = (m * sxy - sx * sy) / det;
    return (sy - slope * sx) / m;
}

DensityReport density_sweep(const DefiningPolynomial& T, const Weight& kappa,
                            const std::vector<BallPoint>& grid,
                            const std::vector<double>& r_ladder, const SweepOptions& opt) {
    if (grid.empty()) throw DomainError("density_sweep: empty grid");
    if (r_ladder.empty()) throw DomainError("density_sweep: empty r ladder");
    for (std::size_t j = 0; j < r_ladder.size(); ++j) {
        if (!(r_ladder[j] > 0.0 && r_ladder[j] <= 0.95))
            throw DomainError("density_sweep: radii must lie in (0, 0.95]");
        if (j > 0 && !(r_ladder[j] > r_ladder[j - 1]))
            throw DomainError("density_sweep: r ladder must increase");
    }
    const int n = grid.front().dim();
    const std::size_t R = r_ladder.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    DensityReport rep;
    rep.grid = grid;
    rep.r_ladder = r_ladder;
    rep.values.assign(grid.size(), std::vector<double>(R, nan));
    const auto fixed = sphere_directions(n, opt.probe_count);
    std::vector<std::vector<double>> fam_sup(fixed.size(), std::vector<double>(R, -INFINITY));
    std::vector<std::vector<double>> fam_inf(fixed.size(), std::vector<double>(R, INFINITY));

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const BallPoint& z = grid[i];
        for (std::size_t j = 0; j < R; ++j) {
            const auto ups = upsilon(T, z, r_ladder[j], opt.upsilon);
            rep.fd_retries += ups.retries;
            if (ups.fd_failure) {
                ++rep.excluded;
                continue;
            }
            const double D = local_density(ups.form, kappa, z);
            rep.values[i][j] = D;
            double best = -INFINITY;
            for (const CVec& v : probe_directions(kappa, z, opt.probe_count))
                best = std::max(best, theta_density(ups.form, kappa, z, v));
            rep.theta_sup_gap = std::max(rep.theta_sup_gap, (D - best) / D);
            for (std::size_t k = 0; k < fixed.size(); ++k) {
                const double q = theta_density(ups.form, kappa, z, fixed[k]);
                fam_sup[k][j] = std::max(fam_sup[k][j], q);
                fam_inf[k][j] = std::min(fam_inf[k][j], q);
            }
        }
    }
    const double cells = static_cast<double>(grid.size() * R);
    if (rep.excluded > opt.max_excluded_fraction * cells)
        throw NumericalError("density_sweep: too many finite-difference failures (" +
                             std::to_string(rep.excluded) + " of " +
                             std::to_string(static_cast<int>(cells)) + " cells)");

    rep.sup_curve.assign(R, -INFINITY);
    rep.inf_curve.assign(R, INFINITY);
    rep.theta_plus_curve.assign(R, -INFINITY);
    rep.theta_minus_curve.assign(R, -INFINITY);
    for (std::size_t j = 0; j < R; ++j) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double v = rep.values[i][j];
            if (std::isnan(v)) continue;
            rep.sup_curve[j] = std::max(rep.sup_curve[j], v);
            rep.inf_curve[j] = std::min(rep.inf_curve[j], v);
        }
        for (std::size_t k = 0; k < fixed.size(); ++k) {
            rep.theta_plus_curve[j] = std::max(rep.theta_plus_curve[j], fam_sup[k][j]);
            rep.theta_minus_curve[j] = std::max(rep.theta_minus_curve[j], fam_inf[k][j]);
        }
    }
    const std::size_t first = R >= 3 ? R - 3 : 0;
    std::vector<double> x, yp, ym;
    for (std::size_t j = first; j < R; ++j) {
        x.push_back(1.0 - r_ladder[j]);
        yp.push_back(rep.sup_curve[j]);
        ym.push_back(rep.inf_curve[j]);
    }
    rep.extrapolated_plus = linear_extrapolate_to_zero(x, yp);
    rep.extrapolated_minus = linear_extrapolate_to_zero(x, ym);
    return rep;
}

void DensityReport::write_csv(std::ostream& os) const {
    const int n = grid.empty() ? 0 : grid.front().dim();
    for (int k = 1; k <= n; ++k) os << 'z' << k << "_re,z" << k << "_im,";
    os << "r,D\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = 0; j < r_ladder.size(); ++j) {
            for (int k = 0; k < n; ++k)
                os << format_double(grid[i][k].real()) << ',' << format_double(grid[i][k].imag())
                   << ',';
            os << format_double(r_ladder[j]) << ',' << format_double(values[i][j]) << '\n';
        }
}

nlohmann::json DensityReport::summary() const {
    nlohmann::json j;
    j["grid_points"] = grid.size();
    j["r_ladder"] = r_ladder;
    j["sup_curve"] = sup_curve;
    j["inf_curve"] = inf_curve;
    j["extrapolated_plus"] = extrapolated_plus;
    j["extrapolated_minus"] = extrapolated_minus;
    j["extrapolation"] = "least-squares line in (1 - r) through the last three radii";
    j["excluded"] = excluded;
    j["fd_retries"] = fd_retries;
    j["theta_sup_gap"] = theta_sup_gap;
    j["theta_plus_curve"] = theta_plus_curve;
    j["theta_minus_curve"] = theta_minus_curve;
    return j;
}

}  // namespace bergman
