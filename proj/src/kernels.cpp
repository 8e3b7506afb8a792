#include "bergman/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace bergman::kernels {
namespace {

const LeafTable& leaves_for(Isa isa) {
    if (isa == Isa::avx2) {
        const LeafTable* t = avx2_leaves();
        if (t == nullptr || !cpu_has_avx2())
            throw std::runtime_error("AVX2 kernels requested but not available");
        return *t;
    }
    return scalar_leaves();
}

Isa detect() {
    if (const char* env = std::getenv("BERGMAN_ISA")) {
        const std::string v(env);
        if (v == "scalar") return Isa::scalar;
        if (v == "avx2" && avx2_leaves() != nullptr && cpu_has_avx2()) return Isa::avx2;
    }
    return (avx2_leaves() != nullptr && cpu_has_avx2()) ? Isa::avx2 : Isa::scalar;
}

// Pairwise split; the split point is a multiple of 4 so leaf lane assignment
// does not depend on where a leaf starts.
std::size_t split_point(std::size_t len) { return (len / 8) * 4; }

double sum_rec(const LeafTable& t, const double* v, std::size_t len) {
    if (len <= kLeafSize) return t.sum(v, len);
    const std::size_t m = split_point(len);
    return sum_rec(t, v, m) + sum_rec(t, v + m, len - m);
}

double wsum_rec(const LeafTable& t, const double* v, const double* w, std::size_t len) {
    if (len <= kLeafSize) return t.weighted_sum(v, w, len);
    const std::size_t m = split_point(len);
    return wsum_rec(t, v, w, m) + wsum_rec(t, v + m, w + m, len - m);
}

std::complex<double> cdot_rec(const LeafTable& t, const double* ar, const double* ai,
                              const double* br, const double* bi, const double* w,
                              std::size_t len) {
    if (len <= kLeafSize) return t.weighted_cdot(ar, ai, br, bi, w, len);
    const std::size_t m = split_point(len);
    return cdot_rec(t, ar, ai, br, bi, w, m) +
           cdot_rec(t, ar + m, ai + m, br + m, bi + m, w + m, len - m);
}

}  // namespace

bool cpu_has_avx2() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa active_isa() {
    static const Isa isa = detect();
    return isa;
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

double sum(std::span<const double> v, Isa isa) {
    return sum_rec(leaves_for(isa), v.data(), v.size());
}

double weighted_sum(std::span<const double> v, std::span<const double> w, Isa isa) {
    if (v.size() != w.size()) throw std::invalid_argument("weighted_sum: size mismatch");
    return wsum_rec(leaves_for(isa), v.data(), w.data(), v.size());
}

std::complex<double> weighted_cdot(std::span<const double> a_re, std::span<const double> a_im,
                                   std::span<const double> b_re, std::span<const double> b_im,
                                   std::span<const double> w, Isa isa) {
    const std::size_t n = w.size();
    if (a_re.size() != n || a_im.size() != n || b_re.size() != n || b_im.size() != n)
        throw std::invalid_argument("weighted_cdot: size mismatch");
    return cdot_rec(leaves_for(isa), a_re.data(), a_im.data(), b_re.data(), b_im.data(),
                    w.data(), n);
}

double sum(std::span<const double> v) { return sum(v, active_isa()); }

double weighted_sum(std::span<const double> v, std::span<const double> w) {
    return weighted_sum(v, w, active_isa());
}

std::complex<double> weighted_cdot(std::span<const double> a_re, std::span<const double> a_im,
                                   std::span<const double> b_re, std::span<const double> b_im,
                                   std::span<const double> w) {
    return weighted_cdot(a_re, a_im, b_re, b_im, w, active_isa());
}

}  // namespace bergman::kernels
