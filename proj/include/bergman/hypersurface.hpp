#pragma once
// Hypersurfaces W = {T = 0}: sampling with Bergman area weights, Bergman–Green
// distance to W, and local flatness diagnostics.
#include "bergman/geometry.hpp"
#include "bergman/polynomial.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bergman {

/// Points of W with ω_B-orthonormal tangent frames (n × (n−1), columns) and
/// ω_B^{n−1} area weights. In one variable W is a point set with unit weights.
struct HypersurfaceSample {
    int dim = 0;
    std::vector<BallPoint> points;
    std::vector<CMat> frames;
    std::vector<double> area_weights;
    /// Set when sample_W produced fewer than half the requested points.
    bool sparse = false;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    double total_area() const;
};

/// Samples W ∩ B(0, region_radius).
///
/// n = 1: the roots of T. n ≥ 2: each factor is written as a graph z_k = g(u)
/// over the remaining coordinates (k is the variable of lowest positive degree),
/// u is drawn by jittered stratification of the disk (n = 2) or uniformly from
/// the ball (n = 3), roots in z_k are Newton polished, and the weight is the
/// ω_B^{n−1} mass of the graph over the stratum.
HypersurfaceSample sample_W(const DefiningPolynomial& T, double region_radius, int target_count,
                            std::uint64_t seed);

/// Deterministic sample of W ∩ E(z, r) for n ≤ 2, suited to integrating
/// functions of |F_z(w)|. In the chart y = F_z(w) the piece of W is a graph
/// over its tangent plane at the point nearest 0; the graph is covered by
/// rays from that point, each integrated with Gauss–Legendre pieces graded
/// geometrically away from it. `per_piece` nodes per radial piece, `angular`
/// rays.
HypersurfaceSample sample_W_patch(const DefiningPolynomial& T, const BallPoint& z, double r,
                                  int per_piece = 12, int angular = 48);

/// W seen from a chart y = F_c(x) as the graph y = base + U x + g(x) ν over
/// the tangent plane at `base` (U: n × (n−1) Euclidean-orthonormal, ν unit normal).
class ChartGraph {
public:
    /// `base` must lie on F_c(W) in chart coordinates.
    ChartGraph(const DefiningPolynomial& T, const BallPoint& c, const CVec& base);

    const CMat& tangent() const { return U_; }
    const CVec& normal() const { return nu_; }
    const CVec& base() const { return base_; }

    /// h(y) = T(F_c(y)) and its holomorphic gradient.
    cd h(const CVec& y) const;
    CVec grad_h(const CVec& y) const;

    /// Solves h(base + U x + g ν) = 0 for g by Newton from `guess`.
    std::optional<cd> solve(const CVec& x, cd guess) const;
    CVec point(const CVec& x, cd g) const { return base_ + U_ * x + g * nu_; }
    /// dy/dx at the graph point (n × (n−1)).
    CMat jacobian(const CVec& x, cd g) const;

private:
    const DefiningPolynomial& T_;
    MobiusMap F_;
    CVec base_;
    CMat U_;
    CVec nu_;
};

/// ω_B^{n−1} density of a holomorphic parametrization with Jacobian J at y:
/// (n−1)! 2^{n−1} det(J^T H(y) conj J).
double area_density(const CVec& y, const CMat& J);

/// Columns of `tangent` orthonormalized under ω_B at p.
CMat bergman_orthonormal(const BallPoint& p, const CMat& tangent);

struct FootPoint {
    double distance = 0.0;
    CVec foot;  ///< in ball coordinates
    /// Descent did not converge; distance is the best sampled value.
    bool approximate = false;
    /// Number of distinct converged foot points at the minimal distance.
    int multiplicity = 1;
};

/// δ_B(z, W) = inf_{w ∈ W} |F_z(w)|. Local constrained descent in the chart
/// y = F_z(w) (Newton projection of 0 onto the linearized surface) seeded from
/// 0 and from the closest sample points; never exceeds the best sampled value.
FootPoint dist_to_W(const BallPoint& z, const DefiningPolynomial& T,
                    const HypersurfaceSample& sample, int seeds = 8);

/// True when δ_B(z, W) < eps.
bool tube_membership(const BallPoint& z, const DefiningPolynomial& T,
                     const HypersurfaceSample& sample, double eps);

struct FlatnessReport {
    double C = 0.0;  ///< sup |g(x)|/|x|² over the probe set
    bool violation = false;
    std::string message;
    int probes = 0;
};

/// Writes F_w(W) near 0 as a graph g over its tangent plane and measures
/// sup |g(x)|/|x|² over 0 < |x| < eps0.
FlatnessReport flatness_profile(const DefiningPolynomial& T, const BallPoint& w, double eps0);

}  // namespace bergman
