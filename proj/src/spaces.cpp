#include "bergman/spaces.hpp"

#include "bergman/parallel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace bergman {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double factorial(int k) { return std::tgamma(k + 1.0); }

cd monomial(const MultiIndex& a, const CVec& z) {
    cd v = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (int e = 0; e < a[i]; ++e) v *= z[static_cast<Eigen::Index>(i)];
    return v;
}

int total_degree(const MultiIndex& a) {
    int s = 0;
    for (int e : a) s += e;
    return s;
}

// Rows v_i^T of monomial values at the sample points.
Eigen::MatrixXcd design(const TruncatedSpace& space, const std::vector<BallPoint>& pts) {
    Eigen::MatrixXcd V(static_cast<Eigen::Index>(pts.size()), space.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        V.row(static_cast<Eigen::Index>(i)) = space.monomials(pts[i].coords()).transpose();
    return V;
}

// Σ_i w_i conj(v_i) v_i^T.
Eigen::MatrixXcd weighted_gram(const Eigen::MatrixXcd& V, const Eigen::VectorXd& w) {
    Eigen::MatrixXcd G = V.adjoint() * w.asDiagonal() * V;
    return 0.5 * (G + G.adjoint());
}

double exp_minus_kappa(const Weight& kappa, const CVec& z) { return std::exp(-kappa.value(z)); }

Eigen::MatrixXcd cholesky_factor(const Eigen::MatrixXcd& G, const char* who) {
    Eigen::LLT<Eigen::MatrixXcd> llt(G);
    if (llt.info() != Eigen::Success)
        throw NumericalError(std::string(who) + ": Gram matrix is not positive definite");
    return llt.matrixL();
}

// L⁻¹ A L⁻* for G = L L*.
Eigen::MatrixXcd reduce(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& L) {
    const auto Lt = L.triangularView<Eigen::Lower>();
    Eigen::MatrixXcd X = Lt.solve(A);
    Eigen::MatrixXcd Y = Lt.solve(X.adjoint()).adjoint();
    return 0.5 * (Y + Y.adjoint());
}

// W ⊂ B² as the graph z2 = g(z1), g the smallest root of T(z1, ·).
class Graph {
public:
    explicit Graph(const DefiningPolynomial& T) : T_(T) {
        if (T.dim() != 2) throw DomainError("graph over z1 needs n = 2");
    }

    cd g(cd x) const {
        CVec base(2);
        base << x, 0.0;
        cd best = kInf;
        for (const Polynomial& P : T_.factors()) {
            if (P.degree() == 0) continue;
            for (cd s : polynomial_roots(P.coefficients_in(1, base)))
                if (std::abs(s) < std::abs(best)) best = s;
        }
        if (!std::isfinite(std::abs(best))) throw DomainError("W is not a graph over z1");
        return best;
    }

    CVec point(cd x) const {
        CVec p(2);
        p << x, g(x);
        return p;
    }

    // (1, g'(x)) at the graph point p.
    CVec tangent(const CVec& p) const {
        const CVec grad = T_.gradient(p);
        CVec t(2);
        t << 1.0, -grad[0] / grad[1];
        return t;
    }

    // Radius along the ray of angle θ where the graph leaves the ball.
    double exit_radius(double theta) const {
        const cd e = std::polar(1.0, theta);
        double lo = 0.0, hi = 1.0;
        if (std::norm(g(0.0)) >= 1.0) throw DomainError("W misses the ball over z1 = 0");
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            const cd x = mid * e;
            (std::norm(x) + std::norm(g(x)) < 1.0 ? lo : hi) = mid;
        }
        return lo;
    }

private:
    const DefiningPolynomial& T_;
};

struct PolarNode {
    cd x;
    double weight;  // Lebesgue weight in x
};

std::vector<PolarNode> graph_nodes(const Graph& G, int radial, int angular) {
    std::vector<PolarNode> out;
    for (int k = 0; k < angular; ++k) {
        const double theta = 2.0 * pi * (k + 0.5) / angular;
        const double R = G.exit_radius(theta);
        const Rule1D q = gauss_legendre(radial, 0.0, R);
        for (int i = 0; i < radial; ++i)
            out.push_back({std::polar(q.nodes[i], theta), q.nodes[i] * q.weights[i] * 2.0 * pi / angular});
    }
    return out;
}

}  // namespace

Eigen::VectorXcd TruncatedSpace::monomials(const CVec& z) const {
    Eigen::VectorXcd v(size());
    for (int a = 0; a < size(); ++a) v[a] = monomial(basis[a], z);
    return v;
}

cd TruncatedSpace::evaluate(const Eigen::VectorXcd& coef, const CVec& z) const {
    return monomials(z).transpose() * coef;
}

double TruncatedSpace::norm2(const Eigen::VectorXcd& coef) const {
    return (coef.adjoint() * gram_ball * coef)(0, 0).real();
}

SpaceQuadrature SpaceQuadrature::resolved(int n, int d) const {
    return {radial > 0 ? radial : d + n + 16, angular > 0 ? angular : 4 * d + 16};
}

std::vector<MultiIndex> monomial_basis(int n, int d) {
    std::vector<MultiIndex> out;
    for (int deg = 0; deg <= d; ++deg) {
        MultiIndex a(n, 0);
        // compositions of deg into n parts, first coordinate descending
        std::function<void(int, int)> rec = [&](int i, int left) {
            if (i == n - 1) {
                a[i] = left;
                out.push_back(a);
                return;
            }
            for (int e = left; e >= 0; --e) {
                a[i] = e;
                rec(i + 1, left - e);
            }
        };
        rec(0, deg);
    }
    return out;
}

TruncatedSpace build_space(int n, int d, const Weight& kappa, const SpaceQuadrature& quad) {
    if (n < 1 || n > kMaxDim) throw DomainError("build_space: unsupported dimension");
    if (d < 0) throw DomainError("build_space: negative degree");
    const double sb = kappa.scale * kappa.beta;
    if (!(sb > n))
        throw DomainError("build_space: e^{-kappa} omega_B^n has infinite mass (need scale*beta > n)");
    const SpaceQuadrature q = quad.resolved(n, d);
    TruncatedSpace S;
    S.n = n;
    S.max_degree = d;
    S.basis = monomial_basis(n, d);
    S.weight = kappa;
    S.radial = !kappa.perturbation.has_value();
    const int m = S.size();

    if (S.radial) {
        // ∫_B |z^a|² g(|z|²) dV = π^n a!/(|a|+n−1)! ∫_0^1 t^{|a|+n−1} g(t) dt with
        // g = (n+1)^n 2^n n! (1−t)^{sβ−n−1} e^{−s q t²}.
        const double alpha = sb - n - 1.0;
        const Rule1D rule = gauss_jacobi_unit(q.radial, alpha);
        const double cn = std::pow(n + 1.0, n) * std::pow(2.0, n) * factorial(n);
        auto moment = [&](int p) {
            double s = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const double t = rule.nodes[i];
                s += rule.weights[i] * std::pow(t, p) *
                     std::exp(-kappa.scale * kappa.quartic * t * t);
            }
            return s;
        };
        S.gram_ball = Eigen::MatrixXcd::Zero(m, m);
        parallel_for(static_cast<std::size_t>(m), [&](std::size_t a) {
            const MultiIndex& al = S.basis[a];
            double af = 1.0;
            for (int e : al) af *= factorial(e);
            const int k = total_degree(al);
            S.gram_ball(a, a) = cn * std::pow(pi, n) * af / factorial(k + n - 1) * moment(k + n - 1);
        });
        return S;
    }

    if (n != 1) throw DomainError("build_space: non-radial weights are supported for n = 1 only");
    // z = ρ e^{iθ}: e^{−κ} ω_B = 4 (1−ρ)^α (1+ρ)^α e^{−rest} ρ dρ dθ, α = sβ − 2.
    const double alpha = sb - 2.0;
    const Rule1D rule = gauss_jacobi_unit(q.radial, alpha);
    std::vector<BallPoint> pts;
    std::vector<double> w;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double rho = rule.nodes[i];
        for (int k = 0; k < q.angular; ++k) {
            CVec z(1);
            z[0] = std::polar(rho, 2.0 * pi * k / q.angular);
            const double rest = kappa.value(z) + sb * std::log1p(-rho * rho);
            pts.emplace_back(z);
            w.push_back(rule.weights[i] * 4.0 * rho * std::pow(1.0 + rho, alpha) * std::exp(-rest) *
                        2.0 * pi / q.angular);
        }
    }
    const Eigen::MatrixXcd V = design(S, pts);
    S.gram_ball = weighted_gram(V, Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())));
    cholesky_factor(S.gram_ball, "build_space");
    return S;
}

HypersurfaceSample point_sample(const std::vector<cd>& points) {
    HypersurfaceSample s;
    s.dim = 1;
    for (cd a : points) {
        if (std::abs(a) >= 1.0) throw DomainError("point_sample: point outside the disk");
        s.points.push_back(BallPoint{a});
        s.frames.push_back(CMat::Zero(1, 0));
        s.area_weights.push_back(1.0);
    }
    return s;
}

HypersurfaceSample graph_sample(const DefiningPolynomial& T, int radial, int angular) {
    const Graph G(T);
    HypersurfaceSample s;
    s.dim = 2;
    for (const PolarNode& node : graph_nodes(G, radial, angular)) {
        const CVec p = G.point(node.x);
        CMat J(2, 1);
        J.col(0) = G.tangent(p);
        const BallPoint bp(p);
        s.points.push_back(bp);
        s.frames.push_back(bergman_orthonormal(bp, J));
        s.area_weights.push_back(area_density(p, J) * node.weight);
    }
    return s;
}

RestrictionData restriction(const TruncatedSpace& space, const HypersurfaceSample& w_sample,
                            std::size_t kernel_limit) {
    if (!w_sample.empty() && w_sample.dim != space.n)
        throw DomainError("restriction: sample dimension differs from the space");
    RestrictionData rd;
    rd.space = space;
    rd.w_sample = w_sample;
    const int m = space.size();
    if (w_sample.empty()) {
        rd.gram_W = Eigen::MatrixXcd::Zero(m, m);
        return rd;
    }
    const Eigen::MatrixXcd V = design(space, w_sample.points);
    Eigen::VectorXd w(static_cast<Eigen::Index>(w_sample.size()));
    for (std::size_t i = 0; i < w_sample.size(); ++i)
        w[static_cast<Eigen::Index>(i)] =
            w_sample.area_weights[i] * exp_minus_kappa(space.weight, w_sample.points[i].coords());
    rd.gram_W = weighted_gram(V, w);

    if (w_sample.size() <= kernel_limit) {
        Eigen::LLT<Eigen::MatrixXcd> llt(space.gram_ball);
        if (llt.info() != Eigen::Success) throw NumericalError("restriction: Gram matrix not positive definite");
        Eigen::MatrixXcd K = V * llt.solve(Eigen::MatrixXcd(V.adjoint()));
        K = 0.5 * (K + K.adjoint()).eval();
        const std::size_t N = w_sample.size();
        for (std::size_t i = 0; i < N && !rd.kernel_regularized; ++i)
            for (std::size_t j = i + 1; j < N; ++j)
                if ((w_sample.points[i].coords() - w_sample.points[j].coords()).norm() < 1e-12) {
                    rd.kernel_regularized = true;
                    break;
                }
        if (rd.kernel_regularized) {
            const double ridge = 1e-12 * K.trace().real() / static_cast<double>(N);
            K.diagonal().array() += ridge;
        }
        rd.kernel_at_nodes = K;
    }
    return rd;
}

RestrictionData restriction(const TruncatedSpace& space, const DefiningPolynomial& T,
                            const HypersurfaceSample& w_sample, std::size_t kernel_limit) {
    if (T.dim() != space.n) throw DomainError("restriction: dimension mismatch");
    for (const BallPoint& p : w_sample.points) {
        bool on = false;
        for (const Polynomial& P : T.factors()) {
            if (P.degree() == 0) continue;
            CVec grad;
            const cd v = P.value_and_gradient(p.coords(), grad);
            if (std::abs(v) <= 1e-8 * std::max(1.0, grad.norm())) on = true;
        }
        if (!on) throw DomainError("restriction: sample point is not on W");
    }
    return restriction(space, w_sample, kernel_limit);
}

SamplingConstants sampling_constants(const RestrictionData& rd) {
    if (rd.w_sample.empty()) return {};
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(rd.gram_W, rd.space.gram_ball,
                                                                  Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("sampling_constants: eigensolver failed");
    const Eigen::VectorXd ev = es.eigenvalues();
    return {std::max(0.0, ev.minCoeff()), std::max(0.0, ev.maxCoeff())};
}

double upper_constant_power(const Eigen::MatrixXcd& gram_W, const Eigen::MatrixXcd& gram_ball) {
    const Eigen::MatrixXcd A = reduce(gram_W, cholesky_factor(gram_ball, "upper_constant_power"));
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(A.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += 0.01 * static_cast<double>(i);
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 200000; ++it) {
        Eigen::VectorXcd u = A * v;
        const double next = v.dot(u).real();
        const double nu = u.norm();
        if (nu == 0.0) return 0.0;
        v = u / nu;
        if (it > 10 && std::abs(next - lambda) <= 1e-16 * std::abs(next)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return lambda;
}

Extension least_norm_extension(const RestrictionData& rd, const Eigen::VectorXcd& values) {
    const Eigen::MatrixXcd& K = rd.kernel_at_nodes;
    if (K.size() == 0) throw DomainError("least_norm_extension: kernel matrix not formed");
    if (values.size() != K.rows()) throw DomainError("least_norm_extension: one value per node");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(K);
    const Eigen::VectorXd& lam = es.eigenvalues();
    const Eigen::MatrixXcd& U = es.eigenvectors();
    const double lmax = lam.maxCoeff();
    const double cut = 1e-12 * lmax;
    Extension ext;
    ext.kernel_weights = Eigen::VectorXcd::Zero(values.size());
    const Eigen::VectorXcd proj = U.adjoint() * values;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam[i] <= cut) continue;
        ext.kernel_weights += U.col(i) * (proj[i] / lam[i]);
        ++ext.rank;
    }
    const double lmin = std::abs(lam.minCoeff());
    ext.condition = lmin > 0.0 ? lmax / lmin : kInf;
    ext.ill_conditioned = ext.condition > 1e12;
    ext.norm2 = values.dot(ext.kernel_weights).real();
    const Eigen::MatrixXcd V = design(rd.space, rd.w_sample.points);
    ext.coefficients = rd.space.gram_ball.llt().solve(V.adjoint() * ext.kernel_weights);
    return ext;
}

double extension_norm_ratio(const RestrictionData& rd) {
    if (rd.w_sample.empty()) return kInf;
    const Eigen::MatrixXcd L = cholesky_factor(rd.space.gram_ball, "extension_norm_ratio");
    const Eigen::MatrixXcd V = design(rd.space, rd.w_sample.points);
    Eigen::VectorXd sw(V.rows());
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        sw[i] = std::sqrt(rd.w_sample.area_weights[k] *
                          exp_minus_kappa(rd.space.weight, rd.w_sample.points[k].coords()));
    }
    // B = D^{1/2} V L^{−*}
    const Eigen::MatrixXcd B =
        L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXcd((sw.asDiagonal() * V).adjoint())).adjoint();
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(B);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double smax = sv.maxCoeff();
    double smin2 = kInf;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        const double s2 = sv[i] * sv[i];
        if (s2 > 1e-12 * smax * smax) smin2 = std::min(smin2, s2);
    }
    return std::isfinite(smin2) ? 1.0 / smin2 : kInf;
}

std::vector<cd> hyperbolic_lattice(double h, double rho_max, std::uint64_t seed) {
    if (!(h > 0.0)) throw DomainError("hyperbolic_lattice: step must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<cd> pts{cd(0.0, 0.0)};
    for (int j = 1; j * h <= rho_max + 1e-12; ++j) {
        const double rho = j * h;
        const long m = std::max(1L, std::lround(2.0 * pi * std::sinh(rho) / h));
        const double phase = 2.0 * pi * u(rng) / static_cast<double>(m);
        const double R = std::tanh(rho / 2.0);
        for (long k = 0; k < m; ++k)
            pts.push_back(std::polar(R, phase + 2.0 * pi * static_cast<double>(k) / static_cast<double>(m)));
    }
    return pts;
}

double ring_step_for_separation(double separation) {
    if (!(separation > 0.0 && separation < 1.0))
        throw DomainError("separation must lie in (0, 1)");
    return 2.0 * std::atanh(separation);
}

double divisor_density(const std::vector<cd>& points, double beta, double r) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("divisor_density: radius must lie in (0, 1)");
    std::size_t N = 0;
    for (cd a : points)
        if (std::abs(a) < r) ++N;
    return (1.0 + static_cast<double>(N) * (1.0 - r * r) / (r * r)) / beta;
}

LatticeSetup seip_lattice(double separation, double beta, double rho_limit, std::uint64_t seed) {
    LatticeSetup L;
    L.separation = separation;
    L.h = ring_step_for_separation(separation);
    const int J = static_cast<int>(std::floor(rho_limit / L.h + 1e-12));
    if (J < 2) throw DomainError("seip_lattice: separation too coarse for the lattice extent");
    L.points = hyperbolic_lattice(L.h, J * L.h, seed);
    L.count_radius = std::tanh((J - 0.5) * L.h / 2.0);
    L.density = divisor_density(L.points, beta, L.count_radius);
    return L;
}

double separation_for_density(double beta, double target, double rho_limit) {
    double lo = 0.3, hi = std::tanh(rho_limit / 4.0) - 1e-9;
    if (seip_lattice(lo, beta, rho_limit).density < target ||
        seip_lattice(hi, beta, rho_limit).density > target)
        throw DomainError("separation_for_density: target outside the reachable range");
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (seip_lattice(mid, beta, rho_limit).density > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

SeipRow seip_row(double separation, double beta, int degree, std::uint64_t seed, double rho_limit) {
    const LatticeSetup L = seip_lattice(separation, beta, rho_limit, seed);
    const TruncatedSpace S = build_space(1, degree, Weight::log_family(beta));
    const RestrictionData rd = restriction(S, point_sample(L.points), 0);
    const SamplingConstants sc = sampling_constants(rd);
    return {separation, L.density, L.points.size(), sc.lambda_min, sc.lambda_max,
            extension_norm_ratio(rd)};
}

namespace {

// Fourier modes μ_k, |k| ≤ K, of Δφ on the circle of radius s.
std::vector<cd> laplacian_modes(const std::function<double(cd)>& lap, double s, int M, int K) {
    std::vector<double> vals(M);
    for (int l = 0; l < M; ++l) vals[l] = lap(std::polar(s, 2.0 * pi * l / M));
    std::vector<cd> mu(2 * K + 1);
    for (int k = -K; k <= K; ++k) {
        cd acc = 0.0;
        for (int l = 0; l < M; ++l) acc += vals[l] * std::polar(1.0, -2.0 * pi * k * l / M);
        mu[k + K] = acc / static_cast<double>(M);
    }
    return mu;
}

// s ∫ log|z − s e^{iα}| Δφ(s e^{iα}) dα / 2π, from the modes.
double ring_potential(cd z, double s, const std::vector<cd>& mu, int K) {
    const double r = std::abs(z);
    double v = 0.0;
    if (r >= s) {
        v = mu[K].real() * std::log(r);
        if (r > 0.0) {
            const cd q = s / z;
            cd qm = 1.0;
            for (int m = 1; m <= K; ++m) {
                qm *= q;
                v -= 0.5 * (qm * mu[K - m] + std::conj(qm) * mu[K + m]).real() / m;
            }
        }
    } else {
        v = mu[K].real() * std::log(s);
        const cd q = z / s;
        cd qm = 1.0;
        for (int m = 1; m <= K; ++m) {
            qm *= q;
            v -= 0.5 * (qm * mu[K + m] + std::conj(qm) * mu[K - m]).real() / m;
        }
    }
    return s * v;
}

}  // namespace

Flattening holomorphic_flattening(const std::function<double(cd)>& phi, const FlatteningOptions& opt) {
    const double outer = 0.75, rho0 = 0.6, panel = 0.05;
    const int K = opt.modes, M = opt.angular;
    std::function<double(cd)> lap = opt.laplacian;
    if (!lap) {
        lap = [&phi](cd z) {
            auto five = [&](double h) {
                return (phi(z + h) + phi(z - h) + phi(z + cd(0, h)) + phi(z - cd(0, h)) - 4.0 * phi(z)) /
                       (h * h);
            };
            return (4.0 * five(1e-3) - five(2e-3)) / 3.0;
        };
    }
    // Radial panels of width 0.05; the first is graded toward 0, where
    // s log s is not smooth.
    std::vector<std::pair<double, double>> panels;
    for (int k = 14; k >= 1; --k) panels.push_back({panel * std::ldexp(1.0, -k), panel * std::ldexp(1.0, -k + 1)});
    panels.insert(panels.begin(), {0.0, panel * std::ldexp(1.0, -14)});
    for (double a = panel; a < outer - 1e-12; a += panel) panels.push_back({a, a + panel});
    const Rule1D unit = gauss_legendre(opt.radial, 0.0, 1.0);

    struct Node {
        double s, w;
        std::size_t panel;
        std::vector<cd> mu;
    };
    std::vector<Node> nodes;
    for (std::size_t p = 0; p < panels.size(); ++p) {
        const auto [a, b] = panels[p];
        for (int i = 0; i < opt.radial; ++i) {
            const double s = a + unit.nodes[i] * (b - a);
            nodes.push_back({s, unit.weights[i] * (b - a), p, laplacian_modes(lap, s, M, K)});
        }
    }

    Flattening out;
    for (const Node& nd : nodes) out.laplacian_mass += 2.0 * pi * nd.s * nd.w * nd.mu[K].real();

    // p(z) = (1/2π) ∫_{D(0,3/4)} log|z − ζ| Δφ(ζ) dA(ζ); the panel holding |z|
    // is split there.
    auto potential = [&](cd z) {
        const double r = std::abs(z);
        std::size_t hit = panels.size();
        for (std::size_t p = 0; p < panels.size(); ++p)
            if (r >= panels[p].first && r < panels[p].second) hit = p;
        double v = 0.0;
        for (const Node& nd : nodes)
            if (nd.panel != hit) v += nd.w * ring_potential(z, nd.s, nd.mu, K);
        if (hit < panels.size()) {
            const auto [a, b] = panels[hit];
            for (auto [lo, hi] : {std::pair{a, r}, std::pair{r, b}}) {
                if (hi - lo <= 0.0) continue;
                const Rule1D q = gauss_legendre(opt.radial, lo, hi);
                for (int i = 0; i < opt.radial; ++i)
                    v += q.weights[i] *
                         ring_potential(z, q.nodes[i], laplacian_modes(lap, q.nodes[i], M, K), K);
            }
        }
        return v;
    };
    auto harmonic = [&](cd z) { return phi(z) - potential(z); };

    const int C = 4 * K + 32;
    std::vector<double> hv(C);
    for (int l = 0; l < C; ++l) hv[l] = harmonic(std::polar(rho0, 2.0 * pi * l / C));
    out.taylor.assign(K + 1, 0.0);
    double a0 = 0.0;
    for (double v : hv) a0 += v / C;
    for (int k = 1; k <= K; ++k) {
        cd acc = 0.0;
        for (int l = 0; l < C; ++l) acc += hv[l] * std::polar(1.0, -2.0 * pi * k * l / C);
        out.taylor[k] = acc / static_cast<double>(C) / std::pow(rho0, k);
    }
    auto twoReG = [&](cd z) {
        cd g = 0.0, zk = 1.0;
        for (int k = 1; k <= K; ++k) {
            zk *= z;
            g += out.taylor[k] * zk;
        }
        return 2.0 * g.real();
    };

    for (double rr : {0.0, 0.2, 0.35, 0.5})
        for (int l = 0; l < 16; ++l) {
            const cd z = std::polar(rr, 2.0 * pi * (l + 0.25) / 16);
            out.residual = std::max(out.residual, std::abs(harmonic(z) - a0 - twoReG(z)));
        }
    if (!(out.residual <= opt.tolerance))
        throw NumericalError("holomorphic_flattening: harmonic completion residual " +
                             std::to_string(out.residual));

    const double phi0 = phi(0.0);
    double sup_signed = -kInf;
    const int steps = static_cast<int>(std::lround(0.5 / opt.grid_step));
    for (int i = -steps; i <= steps; ++i)
        for (int j = -steps; j <= steps; ++j) {
            const cd z(i * opt.grid_step, j * opt.grid_step);
            if (std::abs(z) > 0.5 + 1e-12) continue;
            const double d = phi(z) - phi0 - twoReG(z);
            out.K = std::max(out.K, std::abs(d));
            sup_signed = std::max(sup_signed, d);
        }
    out.c = std::exp(sup_signed);
    return out;
}

TubeRatio restriction_inequality_check(const TruncatedSpace& space, const DefiningPolynomial& T,
                                       double eps, const TubeOptions& opt) {
    if (T.dim() != space.n) throw DomainError("restriction_inequality_check: dimension mismatch");
    if (!(eps > 0.0 && eps < 0.5)) throw DomainError("restriction_inequality_check: eps in (0, 0.5)");
    const int m = space.size();
    TubeRatio out;
    out.gram_tube = Eigen::MatrixXcd::Zero(m, m);

    if (space.n == 1) {
        std::vector<cd> roots;
        for (const Polynomial& P : T.factors()) {
            if (P.degree() == 0) continue;
            for (cd s : polynomial_roots(P.coefficients_in(0, CVec::Zero(1))))
                if (std::abs(s) < 1.0) roots.push_back(s);
        }
        if (roots.empty()) throw DomainError("restriction_inequality_check: W is empty");
        for (std::size_t i = 0; i < roots.size(); ++i)
            for (std::size_t j = i + 1; j < roots.size(); ++j)
                if (pseudo_distance(BallPoint{roots[i]}, BallPoint{roots[j]}) < 2.0 * eps / (1.0 + eps * eps))
                    throw NumericalError("restriction_inequality_check: tubes around the zeros overlap");
        BallRuleSpec spec;
        spec.radial = opt.w_radial;
        spec.angular = opt.w_angular;
        const QuadratureRule rule = ball_rule(1, eps, spec);
        for (cd a : roots) {
            const MobiusMap F(BallPoint{a});
            std::vector<BallPoint> pts;
            Eigen::VectorXd w(static_cast<Eigen::Index>(rule.nodes.size()));
            for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
                pts.emplace_back(F(rule.nodes[k]));
                w[static_cast<Eigen::Index>(k)] = rule.weights[k] * exp_minus_kappa(space.weight, pts.back().coords());
            }
            out.gram_tube += weighted_gram(design(space, pts), w);
        }
        out.gram_W = restriction(space, point_sample(roots)).gram_W;
    } else if (space.n == 2) {
        const Graph G(T);
        const std::vector<PolarNode> xs = graph_nodes(G, opt.w_radial, opt.w_angular);
        const Rule1D nr = gauss_legendre(opt.normal_radial, 0.0, eps);
        // Φ(x, ζ) = F_p(ζ ν_p), p = (x, g(x)), ν_p the unit normal of F_p(W) at 0.
        auto Phi = [&](cd x, cd zeta) {
            const CVec p = G.point(x);
            const MobiusMap F{BallPoint(p)};
            const CVec t = F.jacobian(p) * G.tangent(p);
            CVec nu(2);
            nu << -std::conj(t[1]), std::conj(t[0]);
            nu /= nu.norm();
            return F(CVec(zeta * nu));
        };
        std::vector<Eigen::MatrixXcd> partial(xs.size());
        std::vector<int> sign(xs.size(), 0);
        parallel_for(xs.size(), [&](std::size_t ix) {
            const cd x = xs[ix].x;
            std::vector<BallPoint> pts;
            std::vector<double> wv;
            int sg = 0;
            for (int i = 0; i < opt.normal_radial; ++i)
                for (int k = 0; k < opt.normal_angular; ++k) {
                    const cd zeta = std::polar(nr.nodes[i], 2.0 * pi * (k + 0.5) / opt.normal_angular);
                    const double h = 1e-6;
                    Eigen::Matrix4d D;
                    const cd dirs[4][2] = {{h, 0}, {cd(0, h), 0}, {0, h}, {0, cd(0, h)}};
                    for (int c = 0; c < 4; ++c) {
                        const CVec d = (Phi(x + dirs[c][0], zeta + dirs[c][1]) -
                                        Phi(x - dirs[c][0], zeta - dirs[c][1])) /
                                       (2.0 * h);
                        D.col(c) << d[0].real(), d[0].imag(), d[1].real(), d[1].imag();
                    }
                    const double det = D.determinant();
                    const int s = det > 0 ? 1 : (det < 0 ? -1 : 0);
                    if (sg == 0) sg = s;
                    if (s == 0 || s != sg) sg = 2;
                    const BallPoint z(Phi(x, zeta));
                    pts.push_back(z);
                    wv.push_back(xs[ix].weight * nr.weights[i] * nr.nodes[i] * 2.0 * pi / opt.normal_angular *
                                 std::abs(det) * volume_density(z) * exp_minus_kappa(space.weight, z.coords()));
                }
            sign[ix] = sg;
            partial[ix] = weighted_gram(design(space, pts),
                                        Eigen::Map<Eigen::VectorXd>(wv.data(), static_cast<Eigen::Index>(wv.size())));
        });
        for (std::size_t ix = 0; ix < xs.size(); ++ix) {
            if (sign[ix] != sign[0] || sign[ix] == 2 || sign[ix] == 0)
                throw NumericalError("restriction_inequality_check: normal disks overlap (degenerate tube Jacobian)");
            out.gram_tube += partial[ix];
        }
        out.gram_W = restriction(space, graph_sample(T, opt.w_radial, opt.w_angular)).gram_W;
    } else {
        throw DomainError("restriction_inequality_check: n must be 1 or 2");
    }

    auto ratio = [&](const Eigen::VectorXcd& c) {
        const double num = (c.adjoint() * out.gram_tube * c)(0, 0).real();
        const double den = eps * eps * (c.adjoint() * out.gram_W * c)(0, 0).real();
        return den > 1e-300 ? num / den : kInf;
    };
    out.C = kInf;
    for (int a = 0; a < m; ++a) {
        const double r = ratio(Eigen::VectorXcd::Unit(m, a));
        if (std::isfinite(r)) {
            out.C = std::min(out.C, r);
            ++out.tested;
        }
    }
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < opt.random_elements; ++t) {
        Eigen::VectorXcd c(m);
        for (int a = 0; a < m; ++a) c[a] = cd(g(rng), g(rng));
        const double r = ratio(c);
        if (std::isfinite(r)) {
            out.C = std::min(out.C, r);
            ++out.tested;
        }
    }
    // inf over the space: 1 / λ_max(ε² gram_W, gram_tube)
    const Eigen::MatrixXcd R = reduce(eps * eps * out.gram_W, cholesky_factor(out.gram_tube, "tube Gram"));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(R, Eigen::EigenvaluesOnly);
    out.C_space = 1.0 / es.eigenvalues().maxCoeff();
    out.M_upper = upper_constant_power(out.gram_W, space.gram_ball);
    return out;
}

}  // namespace bergman
