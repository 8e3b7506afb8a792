#pragma once

// Holomorphic polynomials on C^n and the defining functions T of hypersurfaces
// W = {T = 0}. A defining polynomial is stored as a product of factors so that
// large point divisors in one variable (lattices) stay well conditioned.
//
// Text format: a JSON list of records {"alpha": [i1, ..., in], "re": x, "im": y}
// for a single factor, or {"factors": [<list>, ...], "exp": <list>} for a
// product with an optional exponential multiplier.

#include "bergman/types.hpp"

#include <json.hpp>

#include <span>
#include <string>
#include <vector>

namespace bergman {

struct Term {
    std::vector<int> alpha;
    cd coef;
};

class Polynomial {
public:
    Polynomial(int n, std::vector<Term> terms);

    static Polynomial constant(int n, cd c);
    /// z_k − c.
    static Polynomial coordinate(int n, int k, cd shift = 0.0);

    int dim() const { return n_; }
    int degree() const { return degree_; }
    const std::vector<Term>& terms() const { return terms_; }

    cd operator()(const CVec& z) const;
    /// Holomorphic gradient (∂P/∂z_1, ..., ∂P/∂z_n).
    CVec gradient(const CVec& z) const;
    /// Value and gradient in one pass.
    cd value_and_gradient(const CVec& z, CVec& grad) const;
    /// Homogenization at degree deg(P): Σ c_α num^α den^{deg − |α|}.
    cd homogeneous(const CVec& num, cd den) const;

    /// Coefficients c_j of s ↦ P(z with z_k replaced by s) = Σ c_j s^j.
    std::vector<cd> coefficients_in(int k, const CVec& z) const;
    /// Highest power of z_k that occurs.
    int degree_in(int k) const { return max_power_[k]; }
    bool is_zero() const { return terms_.empty(); }

    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator+(const Polynomial& o) const;
    Polynomial scaled(cd c) const;

private:
    void canonicalize();

    int n_;
    int degree_ = 0;
    std::vector<Term> terms_;
    std::vector<int> max_power_;  // per variable
};

/// Roots of Σ c_j s^j. Leading coefficients below `trim`·max|c_j| are
/// dropped first; the roots come from the companion matrix and are polished
/// by Newton steps.
std::vector<cd> polynomial_roots(std::vector<cd> coef, double trim = 1e-13);

/// T = e^h · Π_k P_k with polynomial factors P_k and an optional zero-free
/// multiplier e^h (h polynomial, zero by default). Only the product is
/// meaningful; the factorization is a conditioning device and the multiplier
/// lets tests change T without changing W.
class DefiningPolynomial {
public:
    explicit DefiningPolynomial(Polynomial p);
    explicit DefiningPolynomial(std::vector<Polynomial> factors);

    /// Π (z − a_k) in one variable.
    static DefiningPolynomial from_roots(std::span<const cd> roots);

    int dim() const { return n_; }
    int degree() const;
    const std::vector<Polynomial>& factors() const { return factors_; }

    cd operator()(const CVec& z) const;
    CVec gradient(const CVec& z) const;
    /// log|T(z)|² accumulated factor by factor (−∞ on W).
    double log_abs2(const CVec& z) const;
    bool is_constant() const;

    /// T multiplied by another polynomial (appended as a new factor).
    DefiningPolynomial times(const Polynomial& p) const;
    /// T multiplied by e^h.
    DefiningPolynomial times_exp(const Polynomial& h) const;
    /// T multiplied by a nonzero constant.
    DefiningPolynomial scaled(cd c) const;
    const Polynomial& exponent() const { return exponent_; }
    /// Expands the product into a single polynomial.
    Polynomial expanded() const;

    nlohmann::json to_json() const;
    static DefiningPolynomial from_json(const nlohmann::json& j, int n);
    static DefiningPolynomial parse(const std::string& text, int n);

private:
    int n_;
    std::vector<Polynomial> factors_;
    Polynomial exponent_;
};

}  // namespace bergman
