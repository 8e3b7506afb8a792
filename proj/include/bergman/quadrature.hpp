#pragma once

// Quadrature over Euclidean balls B(0, r) and Bergman–Green balls
// E(a, r) = F_a(B(0, r)) against ω_B^n.
//
// n = 1, 2: iterated per-coordinate polar rules. Each complex coordinate w_k
// is written as sqrt(t) e^{iθ}; t gets Gauss–Legendre nodes and θ the uniform
// (trapezoid) rule, which is the Gaussian rule for trigonometric polynomials.
// n = 3: plain Monte Carlo with a fixed seed; the result carries a standard
// error estimate.
//
// Integrands with a logarithmic singularity c·log|T|² along a hypersurface are
// handled by singularity subtraction in the innermost coordinate: the roots
// s_k of T restricted to each inner complex line are located, c·Σ log|w − s_k|²
// is removed from the integrand, and its angular mean is added back exactly
// (the circle mean of log|w − s|² over |w| = ρ is log max(ρ², |s|²)). The
// radial integral of that mean is split at |s_k|².

#include "bergman/geometry.hpp"
#include "bergman/polynomial.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace bergman {

/// Nodes and weights of a one-dimensional rule.
struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss–Legendre on [a, b].
Rule1D gauss_legendre(int count, double a = -1.0, double b = 1.0);

/// Gauss–Jacobi rule for ∫_0^1 f(t) (1 − t)^alpha dt, alpha > −1.
Rule1D gauss_jacobi_unit(int count, double alpha);

/// Failure to integrate: a non-finite integrand value at a node that was not
/// declared singular.
class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, CVec location)
        : NumericalError(what), location_(std::move(location)) {}
    const CVec& location() const { return location_; }

private:
    CVec location_;
};

struct BallRuleSpec {
    /// Gauss nodes per radial variable; 0 picks 48 (n = 1) or 24 (n = 2),
    /// a negative value −k picks k times that default.
    int radial = 0;
    int angular = 0;  ///< Trapezoid nodes per angle; same convention.
    std::size_t mc_samples = 200000;  ///< n = 3 only.
    std::uint64_t seed = 20240607;    ///< n = 3 only.

    /// Same rule with node counts multiplied by `factor`.
    BallRuleSpec refined(int factor) const;
};

/// A materialized rule on B(0, r); weights are ω_B^n masses, so Σ weights ≈ V_n(r).
struct QuadratureRule {
    int dim = 0;
    std::vector<CVec> nodes;
    std::vector<double> weights;
    std::uint64_t seed = 0;
};

QuadratureRule ball_rule(int n, double r, const BallRuleSpec& spec = {});

/// Declares that f − coefficient·log|T|² is smooth on the integration region.
struct LogSingularity {
    const DefiningPolynomial* T = nullptr;
    double coefficient = 1.0;
};

struct BallIntegrand {
    /// Evaluated at points x of E(center, r), in ball coordinates.
    std::function<double(const CVec&)> f;
    LogSingularity singular{};
    /// Optional isolated pole (ball coordinates). Nodes closer than
    /// kPoleExclusion in pseudohyperbolic distance are dropped and counted.
    std::optional<CVec> pole;
};

inline constexpr double kPoleExclusion = 1e-6;

struct QuadResult {
    double value = 0.0;
    double std_error = 0.0;  ///< Monte Carlo only; 0 for deterministic rules.
    std::size_t evaluations = 0;
    std::size_t excluded = 0;
    int roots_subtracted = 0;
};

/// ∫_{E(center, r)} f ω_B^n, computed on B(0, r) through the pullback by F_center.
QuadResult quad_ball(const BallIntegrand& g, const BallPoint& center, double r,
                     const BallRuleSpec& spec = {});

/// (1/V_n(r)) ∫_{E(center, r)} f ω_B^n.
double ball_average(const BallIntegrand& g, const BallPoint& center, double r,
                    const BallRuleSpec& spec = {});

/// Nearest point to the origin on {T ∘ F_center = 0}, by Newton iteration on
/// the linearized surface started at 0. Empty when the iteration leaves the
/// ball or does not settle.
std::optional<CVec> nearest_zero_in_chart(const DefiningPolynomial& T, const CVec& center,
                                          int max_iter = 60);

/// Roots in w of the polynomial P(F_center(base + w·dir)) · (1 − ⟨base + w·dir, center⟩)^deg P,
/// i.e. the zeros of P along a complex line in pulled-back coordinates.
std::vector<cd> line_roots(const Polynomial& P, const MobiusMap& F, const CVec& base,
                           const CVec& dir);

}  // namespace bergman
