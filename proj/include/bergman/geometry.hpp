#pragma once

// Bergman-ball primitives: points, the involutive automorphisms F_a, the
// Bergman metric, invariant volumes and the Green function of the Bergman
// Laplacian.
//
// Volume convention: ω_E^n = (dd^c|z|²)^n = 2^n n! · Lebesgue on R^{2n}, with
// d^c = (i/2)(∂̄ − ∂). Everything that integrates against ω_B^n uses it.

#include "bergman/types.hpp"

#include <optional>

namespace bergman {

/// A point of the unit ball in C^n, 1 ≤ n ≤ kMaxDim.
class BallPoint {
public:
    /// Throws DomainError unless |z| < 1 and 1 ≤ dim ≤ kMaxDim.
    explicit BallPoint(CVec coords);
    BallPoint(std::initializer_list<cd> coords);

    static BallPoint origin(int n);

    int dim() const { return static_cast<int>(coords_.size()); }
    const CVec& coords() const { return coords_; }
    cd operator[](int i) const { return coords_[i]; }
    double norm2() const { return coords_.squaredNorm(); }
    double norm() const { return coords_.norm(); }

private:
    CVec coords_;
};

/// The involution F_a(z) = (a − P_a z − s_a Q_a z) / (1 − ⟨z, a⟩), F_0 = −id.
class MobiusMap {
public:
    explicit MobiusMap(const BallPoint& a);

    const CVec& center() const { return a_; }
    double s() const { return s_; }
    const CMat& P() const { return P_; }
    const CMat& Q() const { return Q_; }
    int dim() const { return static_cast<int>(a_.size()); }

    /// Unchecked evaluation; valid wherever 1 − ⟨z, a⟩ ≠ 0 (all of the closed ball).
    CVec operator()(const CVec& z) const;

    /// Complex Jacobian dF_a at z (holomorphic derivative, n × n).
    CMat jacobian(const CVec& z) const;

private:
    CVec a_;
    double a2_;
    double s_;
    CMat P_;
    CMat Q_;
};

/// Checked application; throws DomainError for |z| ≥ 1.
BallPoint mobius_apply(const MobiusMap& m, const BallPoint& z);

/// Pseudohyperbolic (Bergman–Green) distance |F_a(b)|.
double pseudo_distance(const BallPoint& a, const BallPoint& b);
/// Same quantity for raw coordinates, computed from
/// 1 − |F_a(b)|² = (1 − |a|²)(1 − |b|²)/|1 − ⟨b, a⟩|².
double pseudo_distance(const CVec& a, const CVec& b);

/// Coefficients H_ij of a real (1,1)-form  i Σ H_ij dz_i ∧ dz̄_j.
/// The form evaluated on a vector v is Σ H_ij v_i conj(v_j).
class HermitianForm {
public:
    HermitianForm() = default;
    explicit HermitianForm(CMat m) : m_(std::move(m)) {}

    static HermitianForm zero(int n) { return HermitianForm(CMat::Zero(n, n)); }

    const CMat& matrix() const { return m_; }
    int dim() const { return static_cast<int>(m_.rows()); }

    /// Σ H_ij v_i conj(v_j); real for Hermitian H.
    double operator()(const CVec& v) const;

    bool is_hermitian(double tol = 1e-12) const;
    /// (H + H†)/2.
    HermitianForm symmetrized() const;
    /// Eigenvalues in increasing order.
    Eigen::VectorXd eigenvalues() const;

    HermitianForm operator+(const HermitianForm& o) const { return HermitianForm(m_ + o.m_); }
    HermitianForm operator-(const HermitianForm& o) const { return HermitianForm(m_ - o.m_); }
    HermitianForm operator*(double s) const { return HermitianForm(m_ * s); }

private:
    CMat m_;
};

/// ω_B at z: (n+1)[(1−|z|²)δ_ij + z̄_i z_j]/(1−|z|²)².
HermitianForm bergman_metric(const BallPoint& z);

/// Density of ω_B^n against Lebesgue measure: (n+1)^n 2^n n! (1−|z|²)^{−(n+1)}.
double volume_density(const BallPoint& z);
double volume_density(int n, double norm2);

/// V_n(r) = ∫_{B(0,r)} ω_B^n = ((n+1) 2π r²/(1−r²))^n.
double ball_volume(int n, double r);

/// C_n = (2π)^{−n} (n+1)^{−(n−1)}.
double green_constant(int n);

/// f(t) = −C_n ∫_t^1 (1−u)^{n−1} u^{−n} du for t ∈ (0, 1]; −∞ at t = 0.
double green_profile(int n, double t);

/// Derivative f'(t) = C_n (1−t)^{n−1} / t^n.
double green_profile_derivative(int n, double t);

/// γ_B(z) = G_B(z, 0) = f(|z|²). Returns −∞ at z = 0 (the pole).
double green_gamma(const BallPoint& z);

/// G_B(z, a) = γ_B(F_a(z)). Returns −∞ at z = a.
double green(const BallPoint& z, const BallPoint& a);

/// Mean of G_B(·, y) over the Bergman ball B(0, r) against ω_B^n, as a function
/// of t = |y|². Obtained by integrating the radial flux equation of the Bergman
/// Laplacian: equal to f(t) for t ≥ r² and to
/// f(r²) − C_n ((1−r²)/r²)^n log((1−t)/(1−r²)) inside.
double green_ball_mean(int n, double r, double t);

}  // namespace bergman
