#pragma once
// Truncated weighted Bergman spaces: polynomials of degree ≤ d with the
// ∫_B |F|² e^{−κ} ω_B^n norm, their restrictions to W, sampling constants,
// least-norm interpolation, one-variable holomorphic flattening and tube
// restriction ratios.
#include "bergman/density.hpp"
#include "bergman/hypersurface.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace bergman {

using MultiIndex = std::vector<int>;

struct TruncatedSpace {
    int n = 1;
    int max_degree = 0;
    std::vector<MultiIndex> basis;  ///< graded, then lexicographic
    /// G(a, b) = ∫_B conj(z^a) z^b e^{−κ} ω_B^n, so ‖Σ c_a z^a‖² = c* G c.
    Eigen::MatrixXcd gram_ball;
    Weight weight;
    bool radial = true;

    int size() const { return static_cast<int>(basis.size()); }
    /// (z^a)_a at z.
    Eigen::VectorXcd monomials(const CVec& z) const;
    cd evaluate(const Eigen::VectorXcd& coef, const CVec& z) const;
    double norm2(const Eigen::VectorXcd& coef) const;
};

struct SpaceQuadrature {
    int radial = 0;   ///< Gauss–Jacobi nodes; 0 picks d + n + 16
    int angular = 0;  ///< trapezoid nodes for non-radial weights; 0 picks 4d + 16
    /// Defaults filled in for the given n and d.
    SpaceQuadrature resolved(int n, int d) const;
    SpaceQuadrature doubled() const { return {2 * radial, 2 * angular}; }
};

/// Multi-indices |a| ≤ d in n variables.
std::vector<MultiIndex> monomial_basis(int n, int d);

/// Radial weights (no pluriharmonic perturbation) give a diagonal Gram matrix
/// from a one-dimensional Gauss–Jacobi rule; a perturbed weight is integrated
/// in polar coordinates (n = 1 only). Throws DomainError when sβ ≤ n, where
/// even the constants have infinite norm.
TruncatedSpace build_space(int n, int d, const Weight& kappa, const SpaceQuadrature& q = {});

struct RestrictionData {
    TruncatedSpace space;
    HypersurfaceSample w_sample;
    /// Σ_i w_i e^{−κ(p_i)} conj(v_i) v_i^T with v_i the monomials at p_i.
    Eigen::MatrixXcd gram_W;
    /// K(p_i, p_j); empty when the sample exceeds the size limit.
    Eigen::MatrixXcd kernel_at_nodes;
    /// Coinciding nodes were found and a 1e-12 ridge added to the kernel matrix.
    bool kernel_regularized = false;
};

/// The kernel matrix is formed only for samples of at most `kernel_limit` points.
RestrictionData restriction(const TruncatedSpace& space, const HypersurfaceSample& w_sample,
                            std::size_t kernel_limit = 4000);
/// Same, after checking that every sample point lies on W = {T = 0}
/// (some factor with |P| ≤ 1e-8 max(1, |∇P|)); throws DomainError otherwise.
RestrictionData restriction(const TruncatedSpace& space, const DefiningPolynomial& T,
                            const HypersurfaceSample& w_sample, std::size_t kernel_limit = 4000);

/// Points of a one-variable divisor as a sample with unit weights.
HypersurfaceSample point_sample(const std::vector<cd>& points);

/// Deterministic ω_B^{n−1}-weighted sample of a W ⊂ B² that is a graph over
/// the z1-disk (z2 the smallest root of T(z1, ·)): Gauss–Legendre on each of
/// `angular` rays out to the ball boundary.
HypersurfaceSample graph_sample(const DefiningPolynomial& T, int radial = 32, int angular = 48);

struct SamplingConstants {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
};

/// Extreme generalized eigenvalues of (gram_W, gram_ball): the best constants
/// in λ_min ∫_B ≤ ∫_W ≤ λ_max ∫_B over the truncated space. Rounding below 0
/// is clamped.
SamplingConstants sampling_constants(const RestrictionData& rd);

/// λ_max of (gram_W, gram_ball) by power iteration after a Cholesky
/// reduction; the second route to the upper constant.
double upper_constant_power(const Eigen::MatrixXcd& gram_W, const Eigen::MatrixXcd& gram_ball);

struct Extension {
    Eigen::VectorXcd coefficients;   ///< in the monomial basis
    Eigen::VectorXcd kernel_weights;  ///< F = Σ c_i K(·, p_i)
    double norm2 = 0.0;
    double condition = 1.0;
    bool ill_conditioned = false;  ///< condition > 1e12
    int rank = 0;
};

/// Minimal-norm F with F(p_i) = values_i: kernel solve with a spectral inverse
/// truncated at 1e-12 λ_max.
Extension least_norm_extension(const RestrictionData& rd, const Eigen::VectorXcd& values);

/// sup over data f of ‖F_f‖²_B / ∫_W |f|² e^{−κ}, F_f the least-norm
/// (weighted least-squares) extension: 1/σ² for the smallest nonzero singular
/// value σ of f ↦ e^{−κ/2}√w f at the nodes, relative cutoff 1e-12.
double extension_norm_ratio(const RestrictionData& rd);

/// Rings ρ_j = j h (j ≥ 0) of m_j = round(2π sinh ρ_j / h) points at Euclidean
/// radius tanh(ρ_j / 2), out to ρ ≤ rho_max. Ring phases are drawn from `seed`.
std::vector<cd> hyperbolic_lattice(double h, double rho_max, std::uint64_t seed = 1);

/// Neighbouring rings sit at pseudohyperbolic distance s = tanh(h/2).
double ring_step_for_separation(double separation);

/// D_{0,r} of a one-variable divisor for κ_β, with Υ counted in closed form:
/// (1 + N(1 − r²)/r²)/β, N the number of points in E(0, r).
double divisor_density(const std::vector<cd>& points, double beta, double r);

struct LatticeSetup {
    double separation = 0.0;
    double h = 0.0;
    double count_radius = 0.0;  ///< Euclidean radius where density is counted
    std::vector<cd> points;
    double density = 0.0;
};

/// Lattice for a separation with rings out to ρ ≈ rho_limit; density is
/// counted over the complete rings, out to half a step past the last one.
LatticeSetup seip_lattice(double separation, double beta, double rho_limit = 9.0,
                          std::uint64_t seed = 1);

/// Separation whose lattice has the given counted density (bisection).
double separation_for_density(double beta, double target, double rho_limit = 9.0);

struct SeipRow {
    double separation = 0.0;
    double density = 0.0;
    std::size_t points = 0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double extension_ratio = 0.0;
};

SeipRow seip_row(double separation, double beta, int degree, std::uint64_t seed = 1,
                 double rho_limit = 9.0);

struct Flattening {
    std::vector<cd> taylor;  ///< G(z) = Σ_{k≥1} taylor[k] z^k, taylor[0] = 0
    double K = 0.0;          ///< sup over D(0,1/2) of |φ − φ(0) − 2 Re G|
    /// sup over D(0,1/2) of exp(φ − φ(0) − 2 Re G): the c in
    /// e^{−φ(0) + 2Re G} ≤ c e^{−φ}.
    double c = 0.0;
    double laplacian_mass = 0.0;  ///< ∫_{D(0,3/4)} Δφ dA
    double residual = 0.0;        ///< harmonic completion mismatch
};

struct FlatteningOptions {
    int radial = 8;     ///< Gauss–Legendre nodes per radial panel of width 0.05
    int angular = 128;  ///< samples of Δφ per circle
    int modes = 48;
    double grid_step = 1e-2;
    double tolerance = 1e-6;
    /// Δφ; when empty, 5-point differences of φ with steps 1e-3 and 2e-3,
    /// Richardson-combined.
    std::function<double(cd)> laplacian;
};

/// Holomorphic flattening: φ = p + h on D(0, 3/4) with p the
/// logarithmic potential of Δφ and h harmonic; G completes h − h(0) from its
/// Fourier coefficients on |z| = 0.6. K and c are measured on a grid of the
/// given step. Throws NumericalError when the completion residual exceeds
/// the tolerance.
Flattening holomorphic_flattening(const std::function<double(cd)>& phi,
                                  const FlatteningOptions& opt = {});

struct TubeOptions {
    int w_radial = 24;   ///< along W (n = 2) or the E(w, ε) rule (n = 1)
    int w_angular = 32;
    int normal_radial = 6;
    int normal_angular = 8;
    int random_elements = 100;
    std::uint64_t seed = 7;
};

struct TubeRatio {
    double C = 0.0;        ///< min ratio over basis elements and random elements
    double C_space = 0.0;  ///< inf over the whole truncated space
    double M_upper = 0.0;  ///< λ_max of (gram_W, gram_ball) by power iteration
    int tested = 0;
    Eigen::MatrixXcd gram_tube;
    Eigen::MatrixXcd gram_W;
};

/// Ratios ∫_{N_ε(W)} |F|² e^{−κ} ω_B^n / (ε² ∫_W |F|² e^{−κ} ω_B^{n−1}).
/// n = 1: W the zeros of T, tubes the disks E(w, ε) (must be disjoint).
/// n = 2: W a graph over z1; the tube is swept by the normal disks
/// ζ ↦ F_p(ζ ν_p), |ζ| < ε, and integrated with the numerical Jacobian of that
/// parametrization. Throws NumericalError when the Jacobian degenerates
/// (normal disks overlap).
TubeRatio restriction_inequality_check(const TruncatedSpace& space, const DefiningPolynomial& T,
                                       double eps, const TubeOptions& opt = {});

}  // namespace bergman
