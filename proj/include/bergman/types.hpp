#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace bergman {

using cd = std::complex<double>;

/// Largest ball dimension the library supports. Fixed-capacity Eigen storage
/// keeps the quadrature inner loops free of heap traffic.
inline constexpr int kMaxDim = 3;

using CVec = Eigen::Matrix<cd, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using CMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

/// Input outside the domain of an operation (point not in the ball, bad radius).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical procedure failed to meet its own accuracy contract.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Hermitian inner product ⟨z, a⟩ = Σ z_i conj(a_i).
inline cd inner(const CVec& z, const CVec& a) {
    cd s{0.0, 0.0};
    for (Eigen::Index i = 0; i < z.size(); ++i) s += z[i] * std::conj(a[i]);
    return s;
}

inline double norm2(const CVec& z) { return z.squaredNorm(); }

}  // namespace bergman
