#include "bergman/hypersurface.hpp"

#include "bergman/quadrature.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace bergman {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kResidualTol = 1e-10;
constexpr double kGradientTol = 1e-8;

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

// Orthonormal basis of the complement of the unit vector nu.
CMat complement_basis(const CVec& nu) {
    const int n = static_cast<int>(nu.size());
    if (n == 1) return CMat(1, 0);
    int pivot = 0;
    for (int i = 1; i < n; ++i)
        if (std::abs(nu[i]) > std::abs(nu[pivot])) pivot = i;
    Eigen::MatrixXcd M(n, n);
    M.col(0) = nu;
    int col = 1;
    for (int i = 0; i < n; ++i) {
        if (i == pivot) continue;
        M.col(col) = Eigen::VectorXcd::Unit(n, i);
        ++col;
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(M);
    const Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
    CMat U(n, n - 1);
    for (int j = 1; j < n; ++j) U.col(j - 1) = Q.col(j);
    return U;
}

cd dot(const CVec& a, const CVec& b) {
    cd s{0.0, 0.0};
    for (Eigen::Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

int solve_variable(const Polynomial& P) {
    int best = -1;
    for (int k = 0; k < P.dim(); ++k) {
        const int d = P.degree_in(k);
        if (d == 0) continue;
        if (best < 0 || d <= P.degree_in(best)) best = k;
    }
    return best;
}

// Newton polish of a root of P in coordinate k.
void polish(const Polynomial& P, int k, CVec& z) {
    for (int it = 0; it < 4; ++it) {
        CVec g;
        const cd v = P.value_and_gradient(z, g);
        if (g[k] == cd{0.0, 0.0}) return;
        const cd step = v / g[k];
        z[k] -= step;
        if (std::abs(step) < 1e-16 * (1.0 + std::abs(z[k]))) return;
    }
}

// Samples one factor P of T as a graph over the coordinates other than k.
void sample_factor(const DefiningPolynomial& T, const Polynomial& P, double R, int cells,
                   std::mt19937_64& rng, HypersurfaceSample& out) {
    const int n = P.dim();
    const int k = solve_variable(P);
    if (k < 0) return;
    std::vector<int> others;
    for (int i = 0; i < n; ++i)
        if (i != k) others.push_back(i);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<std::pair<CVec, double>> params;
    if (n == 2) {
        const int m = std::max(1, static_cast<int>(std::ceil(std::sqrt(cells))));
        const double cell = kPi * R * R / (static_cast<double>(m) * m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                const double s = (i + unif(rng)) / m;
                const double th = 2.0 * kPi * (j + unif(rng)) / m;
                CVec u(1);
                u[0] = std::polar(R * std::sqrt(s), th);
                params.emplace_back(u, cell);
            }
    } else {
        const double cell = kPi * kPi * std::pow(R, 4) / 2.0 / cells;
        for (int c = 0; c < cells; ++c) {
            CVec u(2);
            for (int i = 0; i < 2; ++i) u[i] = cd(normal(rng), normal(rng));
            u *= R * std::pow(unif(rng), 0.25) / u.norm();
            params.emplace_back(u, cell);
        }
    }

    for (const auto& [u, cell] : params) {
        CVec z = CVec::Zero(n);
        for (std::size_t j = 0; j < others.size(); ++j) z[others[j]] = u[j];
        for (cd s : polynomial_roots(P.coefficients_in(k, z))) {
            CVec w = z;
            w[k] = s;
            polish(P, k, w);
            if (!(w.norm() < R)) continue;
            if (!(std::abs(T(w)) < kResidualTol)) continue;
            const CVec g = P.gradient(w);
            if (!(g.norm() > kGradientTol) || g[k] == cd{0.0, 0.0}) continue;
            CMat J = CMat::Zero(n, n - 1);
            for (std::size_t j = 0; j < others.size(); ++j) {
                J(others[j], j) = 1.0;
                J(k, j) = -g[others[j]] / g[k];
            }
            const BallPoint p(w);
            out.points.push_back(p);
            out.frames.push_back(bergman_orthonormal(p, J));
            out.area_weights.push_back(area_density(w, J) * cell);
        }
    }
}

std::vector<cd> all_roots_1d(const DefiningPolynomial& T) {
    std::vector<cd> roots;
    const CVec zero = CVec::Zero(1);
    for (const Polynomial& P : T.factors())
        for (cd s : polynomial_roots(P.coefficients_in(0, zero))) roots.push_back(s);
    return roots;
}

}  // namespace

double HypersurfaceSample::total_area() const {
    double s = 0.0;
    for (double w : area_weights) s += w;
    return s;
}

double area_density(const CVec& y, const CMat& J) {
    const int n = static_cast<int>(y.size());
    const CMat H = bergman_metric(BallPoint(y)).matrix();
    const CMat M = J.transpose() * H * J.conjugate();
    return factorial(n - 1) * std::pow(2.0, n - 1) * M.determinant().real();
}

CMat bergman_orthonormal(const BallPoint& p, const CMat& tangent) {
    const CMat H = bergman_metric(p).matrix();
    auto ip = [&](const CVec& a, const CVec& b) {
        return (a.transpose() * H * b.conjugate())(0, 0);
    };
    CMat E = tangent;
    for (Eigen::Index j = 0; j < E.cols(); ++j) {
        CVec v = E.col(j);
        for (Eigen::Index i = 0; i < j; ++i) {
            const CVec ei = E.col(i);
            v -= ip(v, ei) * ei;
        }
        E.col(j) = v / std::sqrt(ip(v, v).real());
    }
    return E;
}

HypersurfaceSample sample_W(const DefiningPolynomial& T, double region_radius, int target_count,
                            std::uint64_t seed) {
    if (!(region_radius > 0.0 && region_radius < 1.0))
        throw DomainError("sample_W: region radius must lie in (0, 1)");
    if (T.is_constant()) {
        HypersurfaceSample empty;
        empty.dim = T.dim();
        return empty;
    }
    HypersurfaceSample out;
    out.dim = T.dim();
    const int n = T.dim();
    if (n == 1) {
        for (cd s : all_roots_1d(T)) {
            if (!(std::abs(s) < region_radius)) continue;
            CVec z(1);
            z[0] = s;
            out.points.emplace_back(z);
            out.frames.emplace_back(1, 0);
            out.area_weights.push_back(1.0);
        }
        return out;
    }
    std::mt19937_64 rng(seed);
    int nonconstant = 0;
    for (const Polynomial& P : T.factors())
        if (P.degree() > 0) ++nonconstant;
    for (const Polynomial& P : T.factors()) {
        if (P.degree() == 0) continue;
        const int k = solve_variable(P);
        const int sheets = std::max(1, P.degree_in(k));
        const int cells = std::max(1, target_count / (sheets * nonconstant));
        sample_factor(T, P, region_radius, cells, rng, out);
    }
    out.sparse = static_cast<int>(out.size()) < target_count / 2;
    return out;
}

ChartGraph::ChartGraph(const DefiningPolynomial& T, const BallPoint& c, const CVec& base)
    : T_(T), F_(c), base_(base) {
    const CVec g = grad_h(base_);
    const double gn = g.norm();
    if (!(gn > 0.0)) throw NumericalError("chart graph: gradient vanishes at the base point");
    nu_ = g.conjugate() / gn;
    U_ = complement_basis(nu_);
}

cd ChartGraph::h(const CVec& y) const { return T_(F_(y)); }

CVec ChartGraph::grad_h(const CVec& y) const {
    return F_.jacobian(y).transpose() * T_.gradient(F_(y));
}

std::optional<cd> ChartGraph::solve(const CVec& x, cd guess) const {
    cd g = guess;
    for (int it = 0; it < 50; ++it) {
        const CVec y = point(x, g);
        const cd v = h(y);
        const cd d = dot(grad_h(y), nu_);
        if (d == cd{0.0, 0.0} || !std::isfinite(std::abs(v))) return std::nullopt;
        const cd step = v / d;
        g -= step;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(g))) return g;
    }
    return std::abs(h(point(x, g))) < kResidualTol ? std::optional<cd>(g) : std::nullopt;
}

CMat ChartGraph::jacobian(const CVec& x, cd g) const {
    const CVec gp = grad_h(point(x, g));
    const cd dn = dot(gp, nu_);
    CMat J = U_;
    for (Eigen::Index j = 0; j < U_.cols(); ++j) J.col(j) += nu_ * (-dot(gp, U_.col(j)) / dn);
    return J;
}

HypersurfaceSample sample_W_patch(const DefiningPolynomial& T, const BallPoint& z, double r,
                                  int per_piece, int angular) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("sample_W_patch: radius must lie in (0, 1)");
    const int n = T.dim();
    if (z.dim() != n) throw DomainError("sample_W_patch: dimension mismatch");
    HypersurfaceSample out;
    out.dim = n;
    if (n == 1) {
        for (cd s : all_roots_1d(T)) {
            CVec w(1);
            w[0] = s;
            if (!(std::abs(s) < 1.0) || !(pseudo_distance(z.coords(), w) < r)) continue;
            out.points.emplace_back(w);
            out.frames.emplace_back(1, 0);
            out.area_weights.push_back(1.0);
        }
        return out;
    }
    if (n != 2) throw DomainError("sample_W_patch: only n <= 2 is supported");
    const MobiusMap F(z);
    const double r2 = r * r;
    const double dtheta = 2.0 * kPi / angular;
    for (const Polynomial& P : T.factors()) {
        if (P.degree() == 0) continue;
        const DefiningPolynomial Tk(P);
        const auto ystar = nearest_zero_in_chart(Tk, z.coords());
        if (!ystar || !(ystar->squaredNorm() < r2)) continue;
        const ChartGraph graph(Tk, z, *ystar);
        const double delta = std::max(ystar->norm(), 1e-12);
        for (int j = 0; j < angular; ++j) {
            const cd dir = std::polar(1.0, dtheta * (j + 0.5));
            auto at = [&](double rho, cd guess) {
                CVec x(1);
                x[0] = rho * dir;
                return graph.solve(x, guess);
            };
            auto radius2 = [&](double rho, cd g) {
                CVec x(1);
                x[0] = rho * dir;
                return graph.point(x, g).squaredNorm();
            };
            // March out to the sphere |y| = r, then bisect.
            double lo = 0.0, hi = 0.0;
            cd g_lo{0.0, 0.0};
            const double step = std::sqrt(r2 - ystar->squaredNorm()) / 8.0;
            for (int it = 0; it < 400; ++it) {
                hi = lo + step;
                const auto g = at(hi, g_lo);
                if (!g) throw NumericalError("sample_W_patch: graph continuation failed");
                if (radius2(hi, *g) >= r2) break;
                lo = hi;
                g_lo = *g;
            }
            for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                const auto g = at(mid, g_lo);
                if (!g) throw NumericalError("sample_W_patch: graph continuation failed");
                if (radius2(mid, *g) < r2) {
                    lo = mid;
                    g_lo = *g;
                } else {
                    hi = mid;
                }
            }
            const double rho_max = lo;
            std::vector<double> breaks{0.0};
            for (double b = delta; b < rho_max; b *= 4.0) breaks.push_back(b);
            breaks.push_back(rho_max);
            cd guess{0.0, 0.0};
            for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
                const Rule1D q = gauss_legendre(per_piece, breaks[p], breaks[p + 1]);
                for (int i = 0; i < per_piece; ++i) {
                    CVec x(1);
                    x[0] = q.nodes[i] * dir;
                    const auto g = graph.solve(x, guess);
                    if (!g) throw NumericalError("sample_W_patch: graph continuation failed");
                    guess = *g;
                    const CVec y = graph.point(x, *g);
                    const CMat J = graph.jacobian(x, *g);
                    const BallPoint pw(F(y));
                    out.points.push_back(pw);
                    out.frames.push_back(bergman_orthonormal(pw, F.jacobian(y) * J));
                    out.area_weights.push_back(area_density(y, J) * q.nodes[i] * q.weights[i] *
                                               dtheta);
                }
            }
        }
    }
    return out;
}

FootPoint dist_to_W(const BallPoint& z, const DefiningPolynomial& T,
                    const HypersurfaceSample& sample, int seeds) {
    const MobiusMap F(z);
    const int n = z.dim();
    FootPoint best;
    best.distance = INFINITY;
    // Best sampled values.
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < sample.size(); ++i)
        ranked.emplace_back(pseudo_distance(z.coords(), sample.points[i].coords()), i);
    std::sort(ranked.begin(), ranked.end());
    if (!ranked.empty()) {
        best.distance = ranked.front().first;
        best.foot = sample.points[ranked.front().second].coords();
    }
    std::vector<CVec> starts{CVec::Zero(n)};
    for (int i = 0; i < seeds && i < static_cast<int>(ranked.size()); ++i)
        starts.push_back(F(sample.points[ranked[i].second].coords()));

    std::vector<CVec> converged;
    for (CVec y : starts) {
        bool ok = false;
        for (int it = 0; it < 100; ++it) {
            const CVec x = F(y);
            const cd h = T(x);
            const CVec g = F.jacobian(y).transpose() * T.gradient(x);
            const double g2 = g.squaredNorm();
            if (!(g2 > 0.0) || !std::isfinite(g2)) break;
            const CVec next = (dot(g, y) - h) / g2 * g.conjugate();
            if (!(next.squaredNorm() < 1.0)) break;
            const double stepn = (next - y).norm();
            y = next;
            if (stepn < 1e-15) {
                ok = std::abs(T(F(y))) < kResidualTol;
                break;
            }
        }
        if (!ok && y.squaredNorm() < 1.0 && std::abs(T(F(y))) < 1e-13) ok = true;
        if (ok) converged.push_back(y);
    }
    if (converged.empty()) {
        best.approximate = true;
        if (!std::isfinite(best.distance))
            throw NumericalError("dist_to_W: no sample points and descent failed");
        return best;
    }
    double dmin = INFINITY;
    for (const CVec& y : converged) dmin = std::min(dmin, y.norm());
    std::vector<CVec> feet;
    for (const CVec& y : converged) {
        if (y.norm() > dmin * (1.0 + 1e-9) + 1e-15) continue;
        bool seen = false;
        for (const CVec& f : feet) seen = seen || (f - y).norm() < 1e-6;
        if (!seen) feet.push_back(y);
    }
    if (dmin <= best.distance) {
        best.distance = dmin;
        best.foot = F(feet.front());
    }
    best.multiplicity = static_cast<int>(feet.size());
    return best;
}

bool tube_membership(const BallPoint& z, const DefiningPolynomial& T,
                     const HypersurfaceSample& sample, double eps) {
    return dist_to_W(z, T, sample).distance < eps;
}

FlatnessReport flatness_profile(const DefiningPolynomial& T, const BallPoint& w, double eps0) {
    FlatnessReport rep;
    const int n = w.dim();
    if (!(std::abs(T(w.coords())) < 1e-8)) throw DomainError("flatness_profile: w is not on W");
    if (n == 1) return rep;
    const ChartGraph graph(T, w, CVec::Zero(n));
    // Probe directions in the tangent plane.
    std::vector<CVec> dirs;
    if (n == 2) {
        for (int j = 0; j < 16; ++j) {
            CVec d(1);
            d[0] = std::polar(1.0, 2.0 * kPi * j / 16);
            dirs.push_back(d);
        }
    } else {
        for (int a = 0; a <= 4; ++a)
            for (int j = 0; j < 6; ++j) {
                const double al = 0.5 * kPi * a / 4;
                CVec d(2);
                d[0] = std::polar(std::cos(al), 2.0 * kPi * j / 6);
                d[1] = std::polar(std::sin(al), 2.0 * kPi * (j + 0.5 * a) / 6);
                dirs.push_back(d);
            }
    }
    const double gnorm = graph.grad_h(CVec::Zero(n)).norm();
    for (const CVec& d : dirs) {
        cd guess{0.0, 0.0};
        for (int k = 1; k <= 8; ++k) {
            const double rho = eps0 * k / 8.0;
            const CVec x = rho * d;
            const auto g = graph.solve(x, guess);
            ++rep.probes;
            if (!g) {
                rep.violation = true;
                rep.message = "graph representation fails at |x| = " + std::to_string(rho);
                return rep;
            }
            const CVec y = graph.point(x, *g);
            if (std::abs(dot(graph.grad_h(y), graph.normal())) < 0.1 * gnorm) {
                rep.violation = true;
                rep.message = "near-vertical tangent at |x| = " + std::to_string(rho);
                return rep;
            }
            guess = *g;
            rep.C = std::max(rep.C, std::abs(*g) / (rho * rho));
        }
    }
    return rep;
}

}  // namespace bergman
