#pragma once
// The averaged potential of log|T|², the total density tensor Υ_r, pointwise
// densities D_{z,r} against a weight κ, and grid sweeps toward D^±.
#include "bergman/geometry.hpp"
#include "bergman/polynomial.hpp"
#include "bergman/quadrature.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <vector>

namespace bergman {

/// κ = s·(−β log(1 − |z|²) + 2 Re p + q |z|⁴).
///
/// The pluriharmonic term 2 Re p leaves i∂∂̄κ unchanged; the quartic term is a
/// small smooth plurisubharmonic perturbation.
struct Weight {
    enum class Kind { log_family, polynomial_perturbation };

    Kind kind = Kind::log_family;
    double beta = 2.0;
    std::optional<Polynomial> perturbation;
    double quartic = 0.0;
    double scale = 1.0;

    static Weight log_family(double beta);
    Weight scaled(double s) const;

    double value(const CVec& z) const;
    /// Coefficients of i∂∂̄κ at z.
    HermitianForm hessian(const BallPoint& z) const;
    /// Smallest C with (1/C) ω_B ≤ i∂∂̄κ ≤ C ω_B over `points`. Throws
    /// DomainError if i∂∂̄κ fails to be positive definite at one of them.
    double comparability(const std::vector<BallPoint>& points) const;

    nlohmann::json to_json() const;
};

/// (1/V_n(r)) ∫_{B(0,r)} log|T(F_z(ζ))|² ω_B^n(ζ), the E(z, r)-average of log|T|².
double averaged_potential(const DefiningPolynomial& T, const BallPoint& z, double r,
                          const BallRuleSpec& spec = {});

struct UpsilonOptions {
    double h = 1e-3;
    int max_halvings = 3;
    double psd_tol = 1e-4;
    /// Quadrature for each potential evaluation. Zero node counts pick 48
    /// (n = 1) and 16 (n = 2) per variable.
    BallRuleSpec rule{};
};

struct UpsilonResult {
    HermitianForm form;
    double step = 0.0;  ///< finite-difference step that was accepted
    int retries = 0;
    double min_eigenvalue = 0.0;
    /// Bergman trace tr(ω_B^{-1} Υ), which is ≥ 0 because the E(z, r)-average of
    /// log|T|² is subharmonic for the Bergman Laplacian.
    double bergman_trace = 0.0;
    /// The trace stayed below −psd_tol after all halvings.
    bool fd_failure = false;
};

/// Υ_r(z): complex Hessian of averaged_potential in z. Each quadratic value
/// Υ(v, v) is the 9-point Laplacian of ζ ↦ A(z + ζv) divided by 4; entries come
/// from v = e_k, e_k + e_l and e_k + i e_l. The step is halved while the
/// Bergman trace is below −psd_tol.
///
/// Υ_r is positive semidefinite in one variable but not in general: for a
/// complex hyperplane W and z ∈ W, Υ_r(z) = −ω_B/(n+1) on T_zW for every r.
UpsilonResult upsilon(const DefiningPolynomial& T, const BallPoint& z, double r,
                      const UpsilonOptions& opt = {});

/// Υ_r + (n/(n+1)) ω_B at z.
HermitianForm density_numerator(const HermitianForm& ups, const BallPoint& z);

/// Largest generalized eigenvalue of (Υ + (n/(n+1)) ω_B, i∂∂̄κ).
double local_density(const HermitianForm& ups, const Weight& kappa, const BallPoint& z);
double local_density(const DefiningPolynomial& T, const Weight& kappa, const BallPoint& z,
                     double r, const UpsilonOptions& opt = {});

/// Direction realizing local_density.
CVec top_direction(const HermitianForm& ups, const Weight& kappa, const BallPoint& z);

/// ((Υ + (n/(n+1)) ω_B)(v, v)) / (i∂∂̄κ(v, v)).
double theta_density(const HermitianForm& ups, const Weight& kappa, const BallPoint& z,
                     const CVec& v);
double theta_density(const DefiningPolynomial& T, const Weight& kappa, const BallPoint& z,
                     double r, const CVec& v, const UpsilonOptions& opt = {});

/// `count` directions spread over the unit sphere of i∂∂̄κ(z). For n = 2 the
/// complex lines are a Fibonacci lattice on the Riemann sphere; otherwise
/// seeded uniform draws.
std::vector<CVec> probe_directions(const Weight& kappa, const BallPoint& z, int count,
                                   std::uint64_t seed = 1);
/// Same construction in the Euclidean frame.
std::vector<CVec> sphere_directions(int n, int count, std::uint64_t seed = 1);

/// Pseudohyperbolically equispaced grid: real coordinates tanh(s)/sqrt(m), s
/// equispaced in [−atanh(radius), atanh(radius)], m = 2 real coordinates of
/// the disk for n = 1 and the n real parts for n ≥ 2. `per_axis`^m points.
std::vector<BallPoint> density_grid(int n, int per_axis, double radius = 0.9);

struct DensityReport {
    std::vector<BallPoint> grid;
    std::vector<double> r_ladder;
    /// values[i][j] = D_{grid[i], r_ladder[j]}; NaN where excluded.
    std::vector<std::vector<double>> values;
    std::vector<double> sup_curve;
    std::vector<double> inf_curve;
    double extrapolated_plus = 0.0;
    double extrapolated_minus = 0.0;
    int excluded = 0;
    int fd_retries = 0;
    /// Largest relative gap between D_{z,r} and the sup of theta_density over
    /// the probe directions at z, over all cells.
    double theta_sup_gap = 0.0;
    /// For the constant-direction family θ_v (v from a fixed probe set):
    /// sup_v sup_z and sup_v inf_z of theta_density, per r. The first matches
    /// sup_curve up to probe resolution; the second can only lie below inf_curve.
    std::vector<double> theta_plus_curve;
    std::vector<double> theta_minus_curve;

    void write_csv(std::ostream& os) const;
    nlohmann::json summary() const;
};

struct SweepOptions {
    UpsilonOptions upsilon{};
    int probe_count = 64;
    double max_excluded_fraction = 0.1;
};

/// Fills D_{z,r} over grid × r_ladder and extrapolates the last three r values
/// linearly in (1 − r) to r = 1.
DensityReport density_sweep(const DefiningPolynomial& T, const Weight& kappa,
                            const std::vector<BallPoint>& grid,
                            const std::vector<double>& r_ladder, const SweepOptions& opt = {});

/// Value at x = 0 of the least-squares line through (x_i, y_i).
double linear_extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace bergman
