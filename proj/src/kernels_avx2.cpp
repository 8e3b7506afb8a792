#include "bergman/kernels.hpp"

#if defined(BERGMAN_HAVE_AVX2)

#include <immintrin.h>

#include <array>

namespace bergman::kernels {
namespace {

inline __m256i tail_mask(std::size_t remaining) {
    const __m256i lane = _mm256_setr_epi64x(0, 1, 2, 3);
    const __m256i count = _mm256_set1_epi64x(static_cast<long long>(remaining));
    return _mm256_cmpgt_epi64(count, lane);
}

inline double combine(__m256d acc) {
    alignas(32) std::array<double, 4> lanes;
    _mm256_store_pd(lanes.data(), acc);
    return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double leaf_sum(const double* v, std::size_t len) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(v + i));
    if (i < len) acc = _mm256_add_pd(acc, _mm256_maskload_pd(v + i, tail_mask(len - i)));
    return combine(acc);
}

double leaf_weighted_sum(const double* v, const double* w, std::size_t len) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(v + i), _mm256_loadu_pd(w + i), acc);
    if (i < len) {
        const __m256i m = tail_mask(len - i);
        acc = _mm256_fmadd_pd(_mm256_maskload_pd(v + i, m), _mm256_maskload_pd(w + i, m), acc);
    }
    return combine(acc);
}

inline void cdot_step(__m256d ar, __m256d ai, __m256d br, __m256d bi, __m256d wi,
                      __m256d& re, __m256d& im) {
    const __m256d t_re = _mm256_fmadd_pd(ar, br, _mm256_mul_pd(ai, bi));
    const __m256d t_im = _mm256_fmsub_pd(ar, bi, _mm256_mul_pd(ai, br));
    re = _mm256_fmadd_pd(wi, t_re, re);
    im = _mm256_fmadd_pd(wi, t_im, im);
}

std::complex<double> leaf_weighted_cdot(const double* a_re, const double* a_im,
                                        const double* b_re, const double* b_im,
                                        const double* w, std::size_t len) {
    __m256d re = _mm256_setzero_pd();
    __m256d im = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        cdot_step(_mm256_loadu_pd(a_re + i), _mm256_loadu_pd(a_im + i),
                  _mm256_loadu_pd(b_re + i), _mm256_loadu_pd(b_im + i),
                  _mm256_loadu_pd(w + i), re, im);
    }
    if (i < len) {
        const __m256i m = tail_mask(len - i);
        cdot_step(_mm256_maskload_pd(a_re + i, m), _mm256_maskload_pd(a_im + i, m),
                  _mm256_maskload_pd(b_re + i, m), _mm256_maskload_pd(b_im + i, m),
                  _mm256_maskload_pd(w + i, m), re, im);
    }
    return {combine(re), combine(im)};
}

}  // namespace

const LeafTable* avx2_leaves() {
    static const LeafTable table{Isa::avx2, &leaf_sum, &leaf_weighted_sum,
                                 &leaf_weighted_cdot};
    return &table;
}

}  // namespace bergman::kernels

#else

namespace bergman::kernels {
const LeafTable* avx2_leaves() { return nullptr; }
}  // namespace bergman::kernels

#endif
