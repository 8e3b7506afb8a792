#include "bergman/quadrature.hpp"

#include "bergman/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace bergman {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Roots farther than this from the origin of the inner disk stay in the smooth part.
constexpr double kRootKeepRadius = 4.0;
// Geometric grading ratio and per-piece node count for the radial integral of
// log max(t, |s|²) above the breakpoint.
constexpr double kGrading = 0.15;
constexpr int kGradedNodes = 12;

int default_radial(int n) { return n == 1 ? 48 : 24; }

double density_constant(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return std::pow(n + 1.0, n) * std::pow(2.0, n) * f;
}

// Accumulates (value, weight) pairs and reduces them with the pairwise kernel.
struct Accumulator {
    std::vector<double> values;
    std::vector<double> weights;
    void add(double v, double w) {
        values.push_back(v);
        weights.push_back(w);
    }
    double total() const { return kernels::weighted_sum(values, weights); }
};

}  // namespace

Rule1D gauss_legendre(int count, double a, double b) {
    if (count < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
    Rule1D r;
    r.nodes.resize(count);
    r.weights.resize(count);
    const int half = (count + 1) / 2;
    // P_count and P_count − 1 at x by the three-term recurrence.
    auto legendre = [count](double x, double& p_prev) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= count; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        p_prev = p0;
        return p1;
    };
    for (int i = 0; i < half; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (count + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0;
            const double p1 = legendre(x, p0);
            dp = count * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0;
        const double p1 = legendre(x, p0);
        dp = count * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[count - 1 - i] = x;
        r.weights[i] = w;
        r.weights[count - 1 - i] = w;
    }
    const double half_len = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (int i = 0; i < count; ++i) {
        r.nodes[i] = mid + half_len * r.nodes[i];
        r.weights[i] *= half_len;
    }
    return r;
}

Rule1D gauss_jacobi_unit(int count, double alpha) {
    if (!(alpha > -1.0)) throw std::invalid_argument("gauss_jacobi_unit: alpha must exceed -1");
    // Golub–Welsch for the weight (1 − x)^alpha on [−1, 1].
    const double beta = 0.0;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(count, count);
    for (int k = 0; k < count; ++k) {
        const double s = 2.0 * k + alpha + beta;
        double a;
        if (k == 0) {
            a = (beta - alpha) / (alpha + beta + 2.0);
        } else {
            a = (beta * beta - alpha * alpha) / (s * (s + 2.0));
        }
        J(k, k) = a;
        if (k + 1 < count) {
            const double m = k + 1.0;
            const double sm = 2.0 * m + alpha + beta;
            const double b2 = 4.0 * m * (m + alpha) * (m + beta) * (m + alpha + beta) /
                              (sm * sm * (sm + 1.0) * (sm - 1.0));
            J(k, k + 1) = J(k + 1, k) = std::sqrt(b2);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    Rule1D r;
    r.nodes.resize(count);
    r.weights.resize(count);
    for (int i = 0; i < count; ++i) {
        const double x = es.eigenvalues()[i];
        const double v0 = es.eigenvectors()(0, i);
        r.nodes[i] = 0.5 * (1.0 + x);
        r.weights[i] = v0 * v0 / (alpha + 1.0);
    }
    return r;
}

BallRuleSpec BallRuleSpec::refined(int factor) const {
    BallRuleSpec s = *this;
    s.radial = (radial > 0 ? radial : 0) * factor;
    s.angular = (angular > 0 ? angular : 0) * factor;
    s.mc_samples = mc_samples * static_cast<std::size_t>(factor);
    if (s.radial == 0) s.radial = -factor;  // resolved against the dimension default
    if (s.angular == 0) s.angular = -factor;
    return s;
}

namespace {

int resolve(int requested, int n) {
    if (requested > 0) return requested;
    if (requested < 0) return default_radial(n) * (-requested);
    return default_radial(n);
}

}  // namespace

QuadratureRule ball_rule(int n, double r, const BallRuleSpec& spec) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("ball_rule: radius must lie in (0, 1)");
    QuadratureRule q;
    q.dim = n;
    q.seed = spec.seed;
    const double K = density_constant(n);
    const double r2 = r * r;
    if (n == 1 || n == 2) {
        const int N = resolve(spec.radial, n);
        const int M = resolve(spec.angular, n);
        const double dtheta = kTwoPi / M;
        const Rule1D outer = gauss_legendre(N, 0.0, r2);
        for (int i = 0; i < N; ++i) {
            for (int j = 0; j < M; ++j) {
                const cd w1 = std::polar(std::sqrt(outer.nodes[i]), dtheta * (j + 0.5));
                const double w_outer = 0.5 * outer.weights[i] * dtheta;
                if (n == 1) {
                    CVec x(1);
                    x[0] = w1;
                    q.nodes.push_back(x);
                    q.weights.push_back(w_outer * K * std::pow(1.0 - outer.nodes[i], -2.0));
                    continue;
                }
                const double t1 = outer.nodes[i];
                const Rule1D inner = gauss_legendre(N, 0.0, r2 - t1);
                for (int k = 0; k < N; ++k) {
                    for (int l = 0; l < M; ++l) {
                        CVec x(2);
                        x[0] = w1;
                        x[1] = std::polar(std::sqrt(inner.nodes[k]), dtheta * (l + 0.5));
                        q.nodes.push_back(x);
                        q.weights.push_back(w_outer * 0.5 * inner.weights[k] * dtheta * K *
                                            std::pow(1.0 - t1 - inner.nodes[k], -3.0));
                    }
                }
            }
        }
        return q;
    }
    // Monte Carlo: uniform points of B(0, r) ⊂ R^{2n}.
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int real_dim = 2 * n;
    double leb = std::pow(kPi, n) * std::pow(r, real_dim);
    for (int k = 2; k <= n; ++k) leb /= k;
    const std::size_t S = spec.mc_samples;
    for (std::size_t s = 0; s < S; ++s) {
        CVec x(n);
        double nn = 0.0;
        for (int i = 0; i < n; ++i) {
            x[i] = cd(normal(rng), normal(rng));
            nn += std::norm(x[i]);
        }
        const double rad = r * std::pow(unif(rng), 1.0 / real_dim);
        x *= rad / std::sqrt(nn);
        q.nodes.push_back(x);
        q.weights.push_back(leb / static_cast<double>(S) * K *
                            std::pow(1.0 - x.squaredNorm(), -(n + 1.0)));
    }
    return q;
}

std::vector<cd> line_roots(const Polynomial& P, const MobiusMap& F, const CVec& base,
                           const CVec& dir) {
    const int d = P.degree();
    if (d == 0) return {};
    const CVec& c = F.center();
    const double c2 = c.squaredNorm();
    const double s = F.s();
    // num(w) = c − (P_c + s Q_c)(base + w dir), den(w) = 1 − ⟨base + w dir, c⟩.
    auto apply_A = [&](const CVec& y) -> CVec {
        if (c2 == 0.0) return y;
        const CVec py = c * (inner(y, c) / c2);
        return py + s * (y - py);
    };
    const CVec num0 = c - apply_A(base);
    const CVec num1 = -apply_A(dir);
    const cd den0 = 1.0 - inner(base, c);
    const cd den1 = -inner(dir, c);

    const int M = d + 1;
    const double rho = 0.75;
    std::vector<cd> samples(M);
    for (int m = 0; m < M; ++m) {
        const cd w = std::polar(rho, kTwoPi * m / M);
        samples[m] = P.homogeneous(num0 + w * num1, den0 + w * den1);
    }
    std::vector<cd> coef(M);
    for (int k = 0; k < M; ++k) {
        cd acc{0.0, 0.0};
        for (int m = 0; m < M; ++m) acc += samples[m] * std::polar(1.0, -kTwoPi * k * m / M);
        coef[k] = acc / (static_cast<double>(M) * std::pow(rho, k));
    }
    return polynomial_roots(std::move(coef));
}

std::optional<CVec> nearest_zero_in_chart(const DefiningPolynomial& T, const CVec& center,
                                          int max_iter) {
    const MobiusMap F{BallPoint(center)};
    const int n = static_cast<int>(center.size());
    CVec y = CVec::Zero(n);
    for (int it = 0; it < max_iter; ++it) {
        const CVec x = F(y);
        const cd h = T(x);
        // Holomorphic chain rule: ∂h/∂y_j = Σ_k ∂T/∂x_k ∂F_k/∂y_j.
        const CVec gT = T.gradient(x);
        const CVec g = F.jacobian(y).transpose() * gT;
        const double g2 = g.squaredNorm();
        if (g2 == 0.0 || !std::isfinite(g2)) return std::nullopt;
        // Closest point to 0 on {h(y) + g·(v − y) = 0}.
        cd gy{0.0, 0.0};
        for (int k = 0; k < n; ++k) gy += g[k] * y[k];
        const CVec next = (gy - h) / g2 * g.conjugate();
        if (!(next.squaredNorm() < 1.0)) return std::nullopt;
        const double step = (next - y).norm();
        y = next;
        if (step < 1e-14) return y;
    }
    return std::abs(T(F(y))) < 1e-10 ? std::optional<CVec>(y) : std::nullopt;
}

namespace {

class PolarIntegrator {
public:
    PolarIntegrator(const BallIntegrand& g, const BallPoint& center, double r,
                    const BallRuleSpec& spec)
        : g_(g), F_(center), n_(center.dim()), r2_(r * r), K_(density_constant(n_)),
          N_(resolve(spec.radial, n_)), M_(resolve(spec.angular, n_)),
          dtheta_(kTwoPi / M_), U_(CMat::Identity(n_, n_)) {
        if (g_.singular.T != nullptr && g_.singular.T->dim() != n_)
            throw DomainError("singular polynomial dimension mismatch");
    }

    QuadResult run() {
        if (n_ == 1) {
            inner_disk(CVec::Zero(1), CVec::Ones(1), 0.0, r2_, 1.0);
        } else {
            setup_frame();
            std::vector<double> breaks{0.0};
            if (outer_break_ > 0.0) breaks.push_back(outer_break_);
            breaks.push_back(r2_);
            const int per_piece = breaks.size() > 2 ? N_ / 2 + 4 : N_;
            for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
                const Rule1D outer = gauss_legendre(per_piece, breaks[p], breaks[p + 1]);
                for (int i = 0; i < per_piece; ++i) {
                    const double t1 = outer.nodes[i];
                    for (int j = 0; j < M_; ++j) {
                        const cd w1 = std::polar(std::sqrt(t1), dtheta_ * (j + 0.5));
                        const CVec base = w1 * U_.col(0);
                        inner_disk(base, U_.col(1), t1, r2_ - t1,
                                   0.5 * outer.weights[i] * dtheta_);
                    }
                }
            }
        }
        QuadResult res;
        res.value = acc_.total();
        res.evaluations = evaluations_;
        res.excluded = excluded_;
        res.roots_subtracted = roots_subtracted_;
        return res;
    }

private:
    double dens(double t) const { return K_ * std::pow(1.0 - t, -(n_ + 1.0)); }

    void setup_frame() {
        if (g_.singular.T == nullptr || g_.singular.T->is_constant()) return;
        const auto y = nearest_zero_in_chart(*g_.singular.T, F_.center());
        if (!y) return;
        const CVec x = F_(*y);
        const CVec g = F_.jacobian(*y).transpose() * g_.singular.T->gradient(x);
        if (g.norm() == 0.0) return;
        const CVec nu = g.conjugate() / g.norm();
        U_.col(1) = nu;
        U_(0, 0) = -std::conj(nu[1]);
        U_(1, 0) = std::conj(nu[0]);
        const double dist2 = y->squaredNorm();
        const double t_break = r2_ - dist2;
        if (t_break > 1e-3 * r2_ && t_break < (1.0 - 1e-3) * r2_) outer_break_ = t_break;
    }

    std::vector<cd> inner_roots(const CVec& base, const CVec& dir) const {
        std::vector<cd> kept;
        if (g_.singular.T == nullptr) return kept;
        for (const Polynomial& P : g_.singular.T->factors())
            for (cd s : line_roots(P, F_, base, dir))
                if (std::abs(s) < kRootKeepRadius) kept.push_back(s);
        return kept;
    }

    double eval_smooth(const CVec& y, cd w, const std::vector<cd>& roots) {
        const CVec x = F_(y);
        double v = g_.f(x);
        ++evaluations_;
        if (!roots.empty()) {
            double sub = 0.0;
            for (cd s : roots) sub += std::log(std::norm(w - s));
            v -= g_.singular.coefficient * sub;
        }
        return v;
    }

    // Integral over the disk |w| < sqrt(R2) of the complex line base + w·dir,
    // with |base|² = base_t, times `outer_weight`.
    void inner_disk(const CVec& base, const CVec& dir, double base_t, double R2,
                    double outer_weight) {
        if (R2 <= 0.0) return;
        Accumulator acc;
        const std::vector<cd> roots = inner_roots(base, dir);
        roots_subtracted_ += static_cast<int>(roots.size());
        const Rule1D radial = gauss_legendre(N_, 0.0, R2);
        for (int i = 0; i < N_; ++i) {
            const double t = radial.nodes[i];
            const double wt = 0.5 * radial.weights[i] * dtheta_ * dens(base_t + t);
            for (int j = 0; j < M_; ++j) {
                double theta = dtheta_ * (j + 0.5);
                cd w = std::polar(std::sqrt(t), theta);
                CVec y = base + w * dir;
                if (g_.pole && pseudo_distance(F_(y), *g_.pole) < kPoleExclusion) {
                    ++excluded_;
                    continue;
                }
                double v = eval_smooth(y, w, roots);
                if (!std::isfinite(v) && !roots.empty()) {
                    // Node landed on the zero set: nudge it along the circle.
                    theta += 1e-7 * dtheta_;
                    w = std::polar(std::sqrt(t), theta);
                    y = base + w * dir;
                    v = eval_smooth(y, w, roots);
                    ++excluded_;
                }
                if (!std::isfinite(v))
                    throw QuadratureError("non-integrable singularity at quadrature node", F_(y));
                acc.add(v, wt);
            }
        }
        if (roots.empty()) {
            acc_.add(acc.total(), outer_weight);
            return;
        }
        const double coef = g_.singular.coefficient;
        for (cd s : roots) {
            const double a = std::norm(s);
            auto piece = [&](double lo, double hi, int count) {
                if (hi <= lo) return;
                const Rule1D q = gauss_legendre(count, lo, hi);
                for (int k = 0; k < count; ++k) {
                    const double t = q.nodes[k];
                    acc.add(coef * std::log(std::max(t, a)), kPi * q.weights[k] * dens(base_t + t));
                }
            };
            if (a >= R2) {
                piece(0.0, R2, N_);
                continue;
            }
            piece(0.0, a, N_);
            // log t on [a, R2], graded toward a so every piece keeps the
            // singularity at t = 0 a fixed fraction of its length away.
            const double d = R2 - a;
            double hi = R2;
            double len = d;
            const double stop = std::max(0.5 * a, 1e-16 * R2);
            while (len > stop) {
                len *= kGrading;
                const double lo = a + len;
                piece(lo, hi, kGradedNodes);
                hi = lo;
            }
            piece(a, hi, kGradedNodes);
        }
        acc_.add(acc.total(), outer_weight);
    }

    const BallIntegrand& g_;
    MobiusMap F_;
    int n_;
    double r2_;
    double K_;
    int N_;
    int M_;
    double dtheta_;
    CMat U_;
    double outer_break_ = 0.0;
    Accumulator acc_;
    std::size_t evaluations_ = 0;
    std::size_t excluded_ = 0;
    int roots_subtracted_ = 0;
};

QuadResult monte_carlo(const BallIntegrand& g, const BallPoint& center, double r,
                       const BallRuleSpec& spec) {
    const QuadratureRule rule = ball_rule(center.dim(), r, spec);
    const MobiusMap F(center);
    std::vector<double> vals;
    std::vector<double> wts;
    vals.reserve(rule.nodes.size());
    wts.reserve(rule.nodes.size());
    QuadResult res;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const CVec x = F(rule.nodes[i]);
        if (g.pole && pseudo_distance(x, *g.pole) < kPoleExclusion) {
            ++res.excluded;
            continue;
        }
        const double v = g.f(x);
        ++res.evaluations;
        if (!std::isfinite(v))
            throw QuadratureError("non-integrable singularity at quadrature node", x);
        vals.push_back(v);
        wts.push_back(rule.weights[i]);
    }
    res.value = kernels::weighted_sum(vals, wts);
    // Standard error of the sample mean of v·w·S.
    const double S = static_cast<double>(rule.nodes.size());
    double mean = res.value / S;
    double ss = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const double e = vals[i] * wts[i] - mean;
        ss += e * e;
    }
    res.std_error = std::sqrt(ss / (S - 1.0)) * std::sqrt(S);
    return res;
}

}  // namespace

QuadResult quad_ball(const BallIntegrand& g, const BallPoint& center, double r,
                     const BallRuleSpec& spec) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("quad_ball: radius must lie in (0, 1)");
    if (!g.f) throw std::invalid_argument("quad_ball: empty integrand");
    if (center.dim() <= 2) return PolarIntegrator(g, center, r, spec).run();
    return monte_carlo(g, center, r, spec);
}

double ball_average(const BallIntegrand& g, const BallPoint& center, double r,
                    const BallRuleSpec& spec) {
    return quad_ball(g, center, r, spec).value / ball_volume(center.dim(), r);
}

}  // namespace bergman
