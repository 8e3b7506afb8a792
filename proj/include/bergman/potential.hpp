#pragma once
// The kernel Γ_r and the singular function s_r = log|T|² − (E(·, r)-average of
// log|T|²), computed from its definition and from its Green representation
// s_r(z) = 2π ∫_{W ∩ E(z,r)} Γ_r(z, ·) ω_B^{n−1}, and the smoothing s_{r,ε}.
#include "bergman/density.hpp"
#include "bergman/hypersurface.hpp"
#include "bergman/quadrature.hpp"

#include <string_view>
#include <vector>

namespace bergman {

/// Γ_r(z, ζ) = G_B(z, ζ) − mean of G_B(·, ζ) over E(z, r). Depends only on
/// t = |F_z(ζ)|² through f(t) − green_ball_mean(t): zero for t ≥ r², negative
/// inside, −∞ at ζ = z.
double gamma_r_kernel(const BallPoint& z, const BallPoint& zeta, double r);

struct KernelEstimate {
    double value = 0.0;
    double est_error = 0.0;
    bool near_pole = false;  ///< |F_z(ζ)| < 1e-6
    std::size_t excluded = 0;
};

/// Same quantity with the E(z, r)-average of G_B(·, ζ) computed by quad_ball.
/// In one variable the logarithmic pole is subtracted exactly; in higher
/// dimension nodes within pseudoradius 1e-6 of ζ are dropped. est_error is the
/// change against the rule with doubled node counts.
KernelEstimate gamma_r_kernel_quad(const BallPoint& z, const BallPoint& zeta, double r,
                                   const BallRuleSpec& spec = {});

enum class PotentialMethod { potential_form, green_form };
std::string_view method_name(PotentialMethod m);

struct PotentialSample {
    BallPoint z;
    double r = 0.0;
    double s_r_value = 0.0;
    PotentialMethod method = PotentialMethod::potential_form;
    double est_error = 0.0;
};

/// Points closer than this to W (pseudohyperbolic) get s_r = −∞.
inline constexpr double kOnWDistance = 1e-5;

/// δ_B(z, W) from the chart descent of each factor; +∞ when no factor has a
/// zero reachable from z.
double chart_distance(const DefiningPolynomial& T, const BallPoint& z);

/// s_r(z) = log|T(z)|² − averaged_potential(T, z, r).
double s_r_potential(const DefiningPolynomial& T, const BallPoint& z, double r,
                     const BallRuleSpec& spec = {});
PotentialSample s_r_potential_sample(const DefiningPolynomial& T, const BallPoint& z, double r,
                                     const BallRuleSpec& spec = {});

/// 2π Σ w_i Γ_r(z, p_i) over the sample points in E(z, r). Throws
/// NumericalError when no sample point lies in E(z, r) although W meets it.
double s_r_green(const DefiningPolynomial& T, const HypersurfaceSample& sample,
                 const BallPoint& z, double r);
/// Green form over sample_W_patch (n ≤ 2) or a dense sample_W (n = 3).
double s_r_green(const DefiningPolynomial& T, const BallPoint& z, double r);
PotentialSample s_r_green_sample(const DefiningPolynomial& T, const BallPoint& z, double r);

struct SmoothingOptions {
    /// Rule on E(z, ε). Zero node counts pick 24 × 24 (n = 1) and 4 × 6 (n = 2).
    BallRuleSpec outer{};
    /// Rule for the E(·, r)-averages at the outer nodes. Zero picks 24 (n = 1)
    /// and 16 (n = 2).
    BallRuleSpec inner{};
};

/// s_{r,ε}(z): E(z, ε)-average of s_r. Computed as the ε-average of log|T|²
/// (singularity subtracted) minus the ε-average of the smooth r-average.
double s_r_smooth(const DefiningPolynomial& T, const BallPoint& z, double r, double eps,
                  const SmoothingOptions& opt = {});

/// C_r = max over the calibration points of log ε² − s_{r,ε}(z), the smallest
/// constant for which log ε² − C_r ≤ s_{r,ε} holds there.
double fit_smoothing_constant(const DefiningPolynomial& T, double r, double eps,
                              const std::vector<BallPoint>& calibration,
                              const SmoothingOptions& opt = {});

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<double> log_delta2;
    std::vector<double> s_values;
};

/// Least-squares slope of s_r(z) against log δ_B(z, W)² along the points
/// `approach` (which should tend to W).
SlopeFit log_singularity_slope(const DefiningPolynomial& T, const std::vector<BallPoint>& approach,
                               double r, const BallRuleSpec& spec = {});

}  // namespace bergman
