#include "bergman/geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace bergman {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_dim(Eigen::Index n) {
    if (n < 1 || n > kMaxDim)
        throw DomainError("ball dimension must be between 1 and " + std::to_string(kMaxDim));
}

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

}  // namespace

BallPoint::BallPoint(CVec coords) : coords_(std::move(coords)) {
    check_dim(coords_.size());
    if (!(coords_.squaredNorm() < 1.0)) throw DomainError("point is not inside the unit ball");
}

BallPoint::BallPoint(std::initializer_list<cd> coords) {
    CVec v(static_cast<Eigen::Index>(coords.size()));
    Eigen::Index i = 0;
    for (cd c : coords) v[i++] = c;
    *this = BallPoint(v);
}

BallPoint BallPoint::origin(int n) { return BallPoint(CVec::Zero(n)); }

MobiusMap::MobiusMap(const BallPoint& a) : a_(a.coords()), a2_(a.norm2()) {
    const Eigen::Index n = a_.size();
    s_ = std::sqrt(1.0 - a2_);
    if (a2_ > 0.0) {
        P_ = a_ * a_.adjoint() / a2_;
    } else {
        P_ = CMat::Zero(n, n);
    }
    Q_ = CMat::Identity(n, n) - P_;
}

CVec MobiusMap::operator()(const CVec& z) const {
    if (a2_ == 0.0) return -z;
    // P_a z = a ⟨z, a⟩ / |a|²
    const cd za = inner(z, a_);
    const CVec pz = a_ * (za / a2_);
    const CVec num = a_ - pz - s_ * (z - pz);
    return num / (1.0 - za);
}

CMat MobiusMap::jacobian(const CVec& z) const {
    const Eigen::Index n = a_.size();
    if (a2_ == 0.0) return -CMat::Identity(n, n);
    const CMat A = P_ + s_ * Q_;
    const cd d = 1.0 - inner(z, a_);
    const CVec num = a_ - A * z;
    return (-A * d + num * a_.adjoint()) / (d * d);
}

BallPoint mobius_apply(const MobiusMap& m, const BallPoint& z) {
    if (z.dim() != m.dim()) throw DomainError("dimension mismatch in mobius_apply");
    return BallPoint(m(z.coords()));
}

double pseudo_distance(const CVec& a, const CVec& b) {
    // Evaluating |F_a(b)| directly keeps full relative accuracy near the
    // diagonal, where the 1 − |F_a(b)|² identity would cancel.
    const double a2 = a.squaredNorm();
    if (a2 == 0.0) return b.norm();
    const cd ba = inner(b, a);
    const CVec pb = a * (ba / a2);
    const double s = std::sqrt(1.0 - a2);
    const CVec num = a - pb - s * (b - pb);
    return num.norm() / std::abs(1.0 - ba);
}

double pseudo_distance(const BallPoint& a, const BallPoint& b) {
    if (a.dim() != b.dim()) throw DomainError("dimension mismatch in pseudo_distance");
    return pseudo_distance(a.coords(), b.coords());
}

double HermitianForm::operator()(const CVec& v) const {
    cd s{0.0, 0.0};
    for (Eigen::Index i = 0; i < m_.rows(); ++i)
        for (Eigen::Index j = 0; j < m_.cols(); ++j) s += m_(i, j) * v[i] * std::conj(v[j]);
    return s.real();
}

bool HermitianForm::is_hermitian(double tol) const {
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

HermitianForm HermitianForm::symmetrized() const {
    return HermitianForm(CMat((m_ + m_.adjoint()) * 0.5));
}

Eigen::VectorXd HermitianForm::eigenvalues() const {
    Eigen::MatrixXcd m = symmetrized().matrix();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

HermitianForm bergman_metric(const BallPoint& z) {
    const int n = z.dim();
    const double t = z.norm2();
    const double d = 1.0 - t;
    CMat g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g(i, j) = (n + 1.0) * ((i == j ? d : 0.0) + std::conj(z[i]) * z[j]) / (d * d);
    return HermitianForm(g);
}

double volume_density(int n, double norm2) {
    check_dim(n);
    return std::pow(n + 1.0, n) * std::pow(2.0, n) * factorial(n) * std::pow(1.0 - norm2, -(n + 1));
}

double volume_density(const BallPoint& z) { return volume_density(z.dim(), z.norm2()); }

double ball_volume(int n, double r) {
    check_dim(n);
    if (!(r >= 0.0 && r < 1.0)) throw DomainError("ball_volume: radius must lie in [0, 1)");
    const double r2 = r * r;
    return std::pow((n + 1.0) * kTwoPi * r2 / (1.0 - r2), n);
}

double green_constant(int n) {
    check_dim(n);
    return std::pow(kTwoPi, -n) * std::pow(n + 1.0, -(n - 1));
}

double green_profile(int n, double t) {
    const double cn = green_constant(n);
    if (t <= 0.0) return -std::numeric_limits<double>::infinity();
    if (t >= 1.0) return 0.0;
    if (n == 1) return cn * std::log(t);
    if (t <= 0.5) {
        // Binomial expansion of (1−u)^{n−1}; the u^{−1} term gives the logarithm.
        double integral = 0.0;
        for (int k = 0; k <= n - 1; ++k) {
            const double c = binomial(n - 1, k) * ((k % 2 == 0) ? 1.0 : -1.0);
            const int p = k - n + 1;  // exponent after integrating u^{k−n}
            if (p == 0) {
                integral += c * (-std::log(t));
            } else {
                integral += c * (1.0 - std::pow(t, p)) / p;
            }
        }
        return -cn * integral;
    }
    // Near t = 1 use the same antiderivative expanded in x = 1 − t, where every
    // term is positive: ∫_0^x s^{n−1}(1−s)^{−n} ds = Σ_m C(n+m−1, m) x^{n+m}/(n+m).
    const double x = 1.0 - t;
    double term_pow = std::pow(x, n);
    double integral = 0.0;
    for (int m = 0; m < 200; ++m) {
        const double term = binomial(n + m - 1, m) * term_pow / (n + m);
        integral += term;
        if (term < 1e-18 * integral) break;
        term_pow *= x;
    }
    return -cn * integral;
}

double green_profile_derivative(int n, double t) {
    return green_constant(n) * std::pow(1.0 - t, n - 1) / std::pow(t, n);
}

double green_gamma(const BallPoint& z) { return green_profile(z.dim(), z.norm2()); }

double green(const BallPoint& z, const BallPoint& a) {
    if (z.dim() != a.dim()) throw DomainError("dimension mismatch in green");
    const double d = pseudo_distance(a.coords(), z.coords());
    return green_profile(z.dim(), d * d);
}

double green_ball_mean(int n, double r, double t) {
    const double r2 = r * r;
    if (t >= r2) return green_profile(n, t);
    const double ratio = std::pow((1.0 - r2) / r2, n);
    return green_profile(n, r2) - green_constant(n) * ratio * std::log((1.0 - t) / (1.0 - r2));
}

}  // namespace bergman
