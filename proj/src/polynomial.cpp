#include "bergman/polynomial.hpp"

#include <Eigen/Eigenvalues>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace bergman {

namespace {

constexpr int kMaxPower = 48;

using PowerTable = std::array<std::array<cd, kMaxPower + 1>, kMaxDim>;

void fill_powers(const CVec& z, const std::vector<int>& max_power, PowerTable& pw) {
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        pw[i][0] = 1.0;
        for (int k = 1; k <= max_power[i]; ++k) pw[i][k] = pw[i][k - 1] * z[i];
    }
}

}  // namespace

Polynomial::Polynomial(int n, std::vector<Term> terms) : n_(n), terms_(std::move(terms)) {
    if (n < 1 || n > kMaxDim) throw DomainError("polynomial dimension out of range");
    for (const Term& t : terms_) {
        if (static_cast<int>(t.alpha.size()) != n)
            throw std::invalid_argument("multi-index length does not match dimension");
        for (int a : t.alpha)
            if (a < 0 || a > kMaxPower) throw std::invalid_argument("exponent out of range");
    }
    canonicalize();
}

void Polynomial::canonicalize() {
    std::map<std::vector<int>, cd> merged;
    for (const Term& t : terms_) merged[t.alpha] += t.coef;
    terms_.clear();
    for (auto& [alpha, c] : merged)
        if (c != cd{0.0, 0.0}) terms_.push_back({alpha, c});
    degree_ = 0;
    max_power_.assign(n_, 0);
    for (const Term& t : terms_) {
        int d = 0;
        for (int i = 0; i < n_; ++i) {
            d += t.alpha[i];
            max_power_[i] = std::max(max_power_[i], t.alpha[i]);
        }
        degree_ = std::max(degree_, d);
    }
}

Polynomial Polynomial::constant(int n, cd c) {
    return Polynomial(n, {Term{std::vector<int>(n, 0), c}});
}

Polynomial Polynomial::coordinate(int n, int k, cd shift) {
    std::vector<int> e(n, 0);
    e[k] = 1;
    return Polynomial(n, {Term{e, 1.0}, Term{std::vector<int>(n, 0), -shift}});
}

cd Polynomial::operator()(const CVec& z) const {
    PowerTable pw;
    fill_powers(z, max_power_, pw);
    cd s{0.0, 0.0};
    for (const Term& t : terms_) {
        cd m = t.coef;
        for (int i = 0; i < n_; ++i) m *= pw[i][t.alpha[i]];
        s += m;
    }
    return s;
}

cd Polynomial::value_and_gradient(const CVec& z, CVec& grad) const {
    PowerTable pw;
    fill_powers(z, max_power_, pw);
    grad = CVec::Zero(n_);
    cd s{0.0, 0.0};
    for (const Term& t : terms_) {
        cd m = t.coef;
        for (int i = 0; i < n_; ++i) m *= pw[i][t.alpha[i]];
        s += m;
        for (int k = 0; k < n_; ++k) {
            if (t.alpha[k] == 0) continue;
            cd d = t.coef * static_cast<double>(t.alpha[k]);
            for (int i = 0; i < n_; ++i) d *= pw[i][i == k ? t.alpha[i] - 1 : t.alpha[i]];
            grad[k] += d;
        }
    }
    return s;
}

CVec Polynomial::gradient(const CVec& z) const {
    CVec g;
    value_and_gradient(z, g);
    return g;
}

cd Polynomial::homogeneous(const CVec& num, cd den) const {
    PowerTable pw;
    fill_powers(num, max_power_, pw);
    std::array<cd, kMaxPower * kMaxDim + 1> den_pw;
    den_pw[0] = 1.0;
    for (int k = 1; k <= degree_; ++k) den_pw[k] = den_pw[k - 1] * den;
    cd s{0.0, 0.0};
    for (const Term& t : terms_) {
        cd m = t.coef;
        int d = 0;
        for (int i = 0; i < n_; ++i) {
            m *= pw[i][t.alpha[i]];
            d += t.alpha[i];
        }
        s += m * den_pw[degree_ - d];
    }
    return s;
}

std::vector<cd> Polynomial::coefficients_in(int k, const CVec& z) const {
    PowerTable pw;
    fill_powers(z, max_power_, pw);
    std::vector<cd> c(max_power_[k] + 1, cd{0.0, 0.0});
    for (const Term& t : terms_) {
        cd m = t.coef;
        for (int i = 0; i < n_; ++i)
            if (i != k) m *= pw[i][t.alpha[i]];
        c[t.alpha[k]] += m;
    }
    return c;
}

std::vector<cd> polynomial_roots(std::vector<cd> coef, double trim) {
    double cmax = 0.0;
    for (cd c : coef) cmax = std::max(cmax, std::abs(c));
    if (cmax == 0.0) return {};
    int deg = static_cast<int>(coef.size()) - 1;
    while (deg > 0 && std::abs(coef[deg]) <= trim * cmax) --deg;
    if (deg <= 0) return {};
    std::vector<cd> roots;
    if (deg == 1) {
        roots.push_back(-coef[0] / coef[1]);
        return roots;
    }
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) C(i, deg - 1) = -coef[i] / coef[deg];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    for (int i = 0; i < deg; ++i) roots.push_back(es.eigenvalues()[i]);
    for (cd& z : roots) {
        for (int it = 0; it < 3; ++it) {
            cd p = coef[deg], dp = 0.0;
            for (int k = deg - 1; k >= 0; --k) {
                dp = dp * z + p;
                p = p * z + coef[k];
            }
            if (std::abs(dp) == 0.0) break;
            z -= p / dp;
        }
    }
    return roots;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    if (o.n_ != n_) throw std::invalid_argument("dimension mismatch in polynomial product");
    std::vector<Term> out;
    for (const Term& a : terms_)
        for (const Term& b : o.terms_) {
            std::vector<int> alpha(n_);
            for (int i = 0; i < n_; ++i) alpha[i] = a.alpha[i] + b.alpha[i];
            out.push_back({alpha, a.coef * b.coef});
        }
    return Polynomial(n_, std::move(out));
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    if (o.n_ != n_) throw std::invalid_argument("dimension mismatch in polynomial sum");
    std::vector<Term> out = terms_;
    out.insert(out.end(), o.terms_.begin(), o.terms_.end());
    return Polynomial(n_, std::move(out));
}

Polynomial Polynomial::scaled(cd c) const {
    std::vector<Term> out = terms_;
    for (Term& t : out) t.coef *= c;
    return Polynomial(n_, std::move(out));
}

DefiningPolynomial::DefiningPolynomial(Polynomial p)
    : DefiningPolynomial(std::vector<Polynomial>{std::move(p)}) {}

DefiningPolynomial::DefiningPolynomial(std::vector<Polynomial> factors)
    : n_(factors.empty() ? 0 : factors.front().dim()),
      factors_(std::move(factors)),
      exponent_(Polynomial(std::max(n_, 1), {})) {
    if (factors_.empty()) throw std::invalid_argument("defining polynomial needs a factor");
    for (const Polynomial& p : factors_) {
        if (p.dim() != n_) throw std::invalid_argument("factor dimensions differ");
        if (p.is_zero()) throw DomainError("defining polynomial is identically zero");
    }
}

DefiningPolynomial DefiningPolynomial::from_roots(std::span<const cd> roots) {
    std::vector<Polynomial> f;
    f.reserve(roots.size());
    for (cd a : roots) f.push_back(Polynomial::coordinate(1, 0, a));
    if (f.empty()) f.push_back(Polynomial::constant(1, 1.0));
    return DefiningPolynomial(std::move(f));
}

int DefiningPolynomial::degree() const {
    int d = 0;
    for (const Polynomial& p : factors_) d += p.degree();
    return d;
}

bool DefiningPolynomial::is_constant() const { return degree() == 0; }

cd DefiningPolynomial::operator()(const CVec& z) const {
    cd v{1.0, 0.0};
    for (const Polynomial& p : factors_) v *= p(z);
    if (!exponent_.is_zero()) v *= std::exp(exponent_(z));
    return v;
}

CVec DefiningPolynomial::gradient(const CVec& z) const {
    // d(Π P_k) = Σ_k (Π_{j≠k} P_j) dP_k, without dividing by possibly zero values.
    const std::size_t m = factors_.size();
    std::vector<cd> vals(m);
    std::vector<CVec> grads(m);
    for (std::size_t k = 0; k < m; ++k) vals[k] = factors_[k].value_and_gradient(z, grads[k]);
    std::vector<cd> prefix(m + 1, 1.0), suffix(m + 1, 1.0);
    for (std::size_t k = 0; k < m; ++k) prefix[k + 1] = prefix[k] * vals[k];
    for (std::size_t k = m; k-- > 0;) suffix[k] = suffix[k + 1] * vals[k];
    CVec g = CVec::Zero(n_);
    for (std::size_t k = 0; k < m; ++k) g += grads[k] * (prefix[k] * suffix[k + 1]);
    if (!exponent_.is_zero()) {
        CVec gh;
        const cd h = exponent_.value_and_gradient(z, gh);
        const cd e = std::exp(h);
        g = e * (g + gh * prefix[m]);
    }
    return g;
}

double DefiningPolynomial::log_abs2(const CVec& z) const {
    double s = 0.0;
    for (const Polynomial& p : factors_) s += std::log(std::norm(p(z)));
    if (!exponent_.is_zero()) s += 2.0 * exponent_(z).real();
    return s;
}

DefiningPolynomial DefiningPolynomial::times(const Polynomial& p) const {
    DefiningPolynomial out = *this;
    if (p.is_zero()) throw DomainError("multiplying by the zero polynomial");
    out.factors_.push_back(p);
    return out;
}

DefiningPolynomial DefiningPolynomial::times_exp(const Polynomial& h) const {
    DefiningPolynomial out = *this;
    out.exponent_ = exponent_ + h;
    return out;
}

DefiningPolynomial DefiningPolynomial::scaled(cd c) const {
    if (c == cd{0.0, 0.0}) throw DomainError("scaling a defining polynomial by zero");
    DefiningPolynomial out = *this;
    out.factors_.front() = out.factors_.front().scaled(c);
    return out;
}

Polynomial DefiningPolynomial::expanded() const {
    Polynomial p = factors_.front();
    for (std::size_t k = 1; k < factors_.size(); ++k) p = p * factors_[k];
    return p;
}

namespace {

nlohmann::json terms_to_json(const Polynomial& p) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Term& t : p.terms())
        arr.push_back({{"alpha", t.alpha}, {"re", t.coef.real()}, {"im", t.coef.imag()}});
    return arr;
}

Polynomial terms_from_json(const nlohmann::json& j, int n) {
    if (!j.is_array()) throw std::invalid_argument("polynomial must be a list of term records");
    std::vector<Term> terms;
    for (const auto& rec : j) {
        if (!rec.is_object()) throw std::invalid_argument("term record must be an object");
        for (const auto& [key, _] : rec.items())
            if (key != "alpha" && key != "re" && key != "im")
                throw std::invalid_argument("unknown key in term record: " + key);
        if (!rec.contains("alpha")) throw std::invalid_argument("term record without alpha");
        Term t;
        t.alpha = rec.at("alpha").get<std::vector<int>>();
        t.coef = cd(rec.value("re", 0.0), rec.value("im", 0.0));
        terms.push_back(std::move(t));
    }
    return Polynomial(n, std::move(terms));
}

}  // namespace

nlohmann::json DefiningPolynomial::to_json() const {
    if (factors_.size() == 1 && exponent_.is_zero()) return terms_to_json(factors_.front());
    nlohmann::json j;
    j["factors"] = nlohmann::json::array();
    for (const Polynomial& p : factors_) j["factors"].push_back(terms_to_json(p));
    if (!exponent_.is_zero()) j["exp"] = terms_to_json(exponent_);
    return j;
}

DefiningPolynomial DefiningPolynomial::from_json(const nlohmann::json& j, int n) {
    if (j.is_array()) return DefiningPolynomial(terms_from_json(j, n));
    if (!j.is_object() || !j.contains("factors"))
        throw std::invalid_argument("polynomial must be a term list or an object with factors");
    for (const auto& [key, _] : j.items())
        if (key != "factors" && key != "exp")
            throw std::invalid_argument("unknown key in polynomial object: " + key);
    std::vector<Polynomial> f;
    for (const auto& fj : j.at("factors")) f.push_back(terms_from_json(fj, n));
    DefiningPolynomial T(std::move(f));
    if (j.contains("exp")) T = T.times_exp(terms_from_json(j.at("exp"), n));
    return T;
}

DefiningPolynomial DefiningPolynomial::parse(const std::string& text, int n) {
    return from_json(nlohmann::json::parse(text), n);
}

}  // namespace bergman
