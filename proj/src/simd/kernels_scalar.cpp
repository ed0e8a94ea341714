// Scalar reference kernels. The arithmetic order here is the contract the
// vector variants reproduce: real and imaginary parts of each complex product
// are formed with separate multiplies and one add/sub, never fused.

#include "spdcwalk/simd/kernels.hpp"

#include <cmath>

namespace spdcwalk::simd {
namespace {

void outer_accumulate_scalar(std::complex<double>* acc, const std::complex<double>* u, std::size_t rows,
                             const std::complex<double>* v, std::size_t cols, std::complex<double> weight) {
    for (std::size_t c = 0; c < cols; ++c) {
        const double tr = weight.real() * v[c].real() - weight.imag() * v[c].imag();
        const double ti = weight.real() * v[c].imag() + weight.imag() * v[c].real();
        std::complex<double>* col = acc + c * rows;
        for (std::size_t r = 0; r < rows; ++r) {
            const double ur = u[r].real();
            const double ui = u[r].imag();
            const double pr = tr * ur - ti * ui;
            const double pi = tr * ui + ti * ur;
            col[r] = {col[r].real() + pr, col[r].imag() + pi};
        }
    }
}

void abs2_scalar(const std::complex<double>* in, double* out, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
        const double re = in[k].real();
        const double im = in[k].imag();
        out[k] = re * re + im * im;
    }
}

double sqrt_product_sum_scalar(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sum += std::sqrt(a[k] * b[k]);
    }
    return sum;
}

}  // namespace

namespace detail {
const KernelTable scalar_table{Isa::Scalar, &outer_accumulate_scalar, &abs2_scalar, &sqrt_product_sum_scalar};
}  // namespace detail

}  // namespace spdcwalk::simd
