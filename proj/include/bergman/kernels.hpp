#pragma once

// Reduction kernels used by every quadrature and Gram assembly in the library.
//
// Each kernel has a scalar reference and an AVX2+FMA variant. Both variants
// evaluate the same summation tree (pairwise recursion down to leaves of at most
// kLeafSize elements, four interleaved accumulators per leaf, zero padding for
// the tail, lanes combined as (l0 + l1) + (l2 + l3)), so their results agree
// bit for bit. The active variant is chosen once at startup from CPUID and can
// be pinned with the BERGMAN_ISA environment variable ("scalar" or "avx2").

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace bergman::kernels {

enum class Isa { scalar, avx2 };

inline constexpr std::size_t kLeafSize = 256;

/// Leaf kernels of one instruction set. Leaves never see more than kLeafSize
/// elements.
struct LeafTable {
    Isa isa;
    double (*sum)(const double* v, std::size_t len);
    double (*weighted_sum)(const double* v, const double* w, std::size_t len);
    std::complex<double> (*weighted_cdot)(const double* a_re, const double* a_im,
                                          const double* b_re, const double* b_im,
                                          const double* w, std::size_t len);
};

const LeafTable& scalar_leaves();
/// Returns nullptr when the binary was built without AVX2 support.
const LeafTable* avx2_leaves();

bool cpu_has_avx2();
Isa active_isa();
std::string_view isa_name(Isa isa);

/// Σ v_i, using the leaves of `isa`.
double sum(std::span<const double> v, Isa isa);
/// Σ w_i v_i.
double weighted_sum(std::span<const double> v, std::span<const double> w, Isa isa);
/// Σ w_i conj(a_i) b_i with a, b given as split real/imaginary arrays.
std::complex<double> weighted_cdot(std::span<const double> a_re, std::span<const double> a_im,
                                   std::span<const double> b_re, std::span<const double> b_im,
                                   std::span<const double> w, Isa isa);

// Front ends dispatching to active_isa().
double sum(std::span<const double> v);
double weighted_sum(std::span<const double> v, std::span<const double> w);
std::complex<double> weighted_cdot(std::span<const double> a_re, std::span<const double> a_im,
                                   std::span<const double> b_re, std::span<const double> b_im,
                                   std::span<const double> w);

}  // namespace bergman::kernels
