// AVX2 variants. Compiled with -mavx2 only (no FMA) so that the complex
// products round exactly like the scalar reference.

#include "spdcwalk/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace spdcwalk::simd {
namespace {

// Two complex doubles per 256-bit register: [re0, im0, re1, im1].
inline __m256d complex_scale(__m256d u, __m256d tr, __m256d ti) {
    const __m256d swapped = _mm256_permute_pd(u, 0b0101);  // [im0, re0, im1, re1]
    // even lanes: tr*re - ti*im, odd lanes: tr*im + ti*re
    return _mm256_addsub_pd(_mm256_mul_pd(tr, u), _mm256_mul_pd(ti, swapped));
}

void outer_accumulate_avx2(std::complex<double>* acc, const std::complex<double>* u, std::size_t rows,
                           const std::complex<double>* v, std::size_t cols, std::complex<double> weight) {
    const auto* up = reinterpret_cast<const double*>(u);
    for (std::size_t c = 0; c < cols; ++c) {
        const double tr = weight.real() * v[c].real() - weight.imag() * v[c].imag();
        const double ti = weight.real() * v[c].imag() + weight.imag() * v[c].real();
        const __m256d vtr = _mm256_set1_pd(tr);
        const __m256d vti = _mm256_set1_pd(ti);
        auto* col = reinterpret_cast<double*>(acc + c * rows);

        std::size_t r = 0;
        for (; r + 2 <= rows; r += 2) {
            const __m256d uv = _mm256_loadu_pd(up + 2 * r);
            const __m256d a = _mm256_loadu_pd(col + 2 * r);
            _mm256_storeu_pd(col + 2 * r, _mm256_add_pd(a, complex_scale(uv, vtr, vti)));
        }
        for (; r < rows; ++r) {
            const double ur = up[2 * r];
            const double ui = up[2 * r + 1];
            const double pr = tr * ur - ti * ui;
            const double pi = tr * ui + ti * ur;
            col[2 * r] += pr;
            col[2 * r + 1] += pi;
        }
    }
}

void abs2_avx2(const std::complex<double>* in, double* out, std::size_t n) {
    const auto* p = reinterpret_cast<const double*>(in);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d a = _mm256_loadu_pd(p + 2 * k);      // re0 im0 re1 im1
        const __m256d b = _mm256_loadu_pd(p + 2 * k + 4);  // re2 im2 re3 im3
        const __m256d aa = _mm256_mul_pd(a, a);
        const __m256d bb = _mm256_mul_pd(b, b);
        // hadd gives [a0+a1, b0+b1, a2+a3, b2+b3] -> k, k+2, k+1, k+3
        const __m256d h = _mm256_hadd_pd(aa, bb);
        const __m256d ordered = _mm256_permute4x64_pd(h, 0b11011000);
        _mm256_storeu_pd(out + k, ordered);
    }
    for (; k < n; ++k) {
        const double re = p[2 * k];
        const double im = p[2 * k + 1];
        out[k] = re * re + im * im;
    }
}

double sqrt_product_sum_avx2(const double* a, const double* b, std::size_t n) {
    __m256d lanes = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
        lanes = _mm256_add_pd(lanes, _mm256_sqrt_pd(prod));
    }
    alignas(32) double partial[4];
    _mm256_store_pd(partial, lanes);
    double sum = (partial[0] + partial[1]) + (partial[2] + partial[3]);
    for (; k < n; ++k) {
        sum += std::sqrt(a[k] * b[k]);
    }
    return sum;
}

}  // namespace

namespace detail {
const KernelTable avx2_table{Isa::Avx2, &outer_accumulate_avx2, &abs2_avx2, &sqrt_product_sum_avx2};
}  // namespace detail

}  // namespace spdcwalk::simd
