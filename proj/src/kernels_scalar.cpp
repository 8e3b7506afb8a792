#include "bergman/kernels.hpp"

#include <array>
#include <cmath>

namespace bergman::kernels {
namespace {

// Four interleaved accumulators; element i feeds lane i % 4. The tail is
// padded with zeros so the lane update sequence matches the vector variant.
double leaf_sum(const double* v, std::size_t len) {
    std::array<double, 4> acc{0.0, 0.0, 0.0, 0.0};
    const std::size_t padded = (len + 3) / 4 * 4;
    for (std::size_t i = 0; i < padded; ++i) {
        const double x = i < len ? v[i] : 0.0;
        acc[i % 4] = acc[i % 4] + x;
    }
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double leaf_weighted_sum(const double* v, const double* w, std::size_t len) {
    std::array<double, 4> acc{0.0, 0.0, 0.0, 0.0};
    const std::size_t padded = (len + 3) / 4 * 4;
    for (std::size_t i = 0; i < padded; ++i) {
        const double x = i < len ? v[i] : 0.0;
        const double y = i < len ? w[i] : 0.0;
        acc[i % 4] = std::fma(x, y, acc[i % 4]);
    }
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

std::complex<double> leaf_weighted_cdot(const double* a_re, const double* a_im,
                                        const double* b_re, const double* b_im,
                                        const double* w, std::size_t len) {
    std::array<double, 4> re{0.0, 0.0, 0.0, 0.0};
    std::array<double, 4> im{0.0, 0.0, 0.0, 0.0};
    const std::size_t padded = (len + 3) / 4 * 4;
    for (std::size_t i = 0; i < padded; ++i) {
        const bool in = i < len;
        const double ar = in ? a_re[i] : 0.0;
        const double ai = in ? a_im[i] : 0.0;
        const double br = in ? b_re[i] : 0.0;
        const double bi = in ? b_im[i] : 0.0;
        const double wi = in ? w[i] : 0.0;
        const double t_re = std::fma(ar, br, ai * bi);
        const double t_im = std::fma(ar, bi, -(ai * br));
        re[i % 4] = std::fma(wi, t_re, re[i % 4]);
        im[i % 4] = std::fma(wi, t_im, im[i % 4]);
    }
    return {(re[0] + re[1]) + (re[2] + re[3]), (im[0] + im[1]) + (im[2] + im[3])};
}

}  // namespace

const LeafTable& scalar_leaves() {
    static const LeafTable table{Isa::scalar, &leaf_sum, &leaf_weighted_sum,
                                 &leaf_weighted_cdot};
    return table;
}

}  // namespace bergman::kernels
