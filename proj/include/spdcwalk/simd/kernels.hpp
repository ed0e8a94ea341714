#pragma once
// Data-parallel inner loops shared by the biphoton and analysis modules.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The variant is selected once per process from CPU capabilities;
// set SPDCWALK_SIMD=scalar|avx2|auto to override.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace spdcwalk::simd {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
    Isa isa;
    // acc(r, c) += weight * u[r] * v[c]; acc is column-major with u.size() rows.
    void (*outer_accumulate)(std::complex<double>* acc, const std::complex<double>* u, std::size_t rows,
                             const std::complex<double>* v, std::size_t cols, std::complex<double> weight);
    // out[k] = |in[k]|^2
    void (*abs2)(const std::complex<double>* in, double* out, std::size_t n);
    // sum_k sqrt(a[k] * b[k])
    double (*sqrt_product_sum)(const double* a, const double* b, std::size_t n);
};

bool cpu_supports(Isa isa);

// Kernel table for a specific ISA; throws std::runtime_error when the ISA was not
// compiled in or the running CPU lacks it.
const KernelTable& kernels_for(Isa isa);

// Table chosen for this process (environment override, then best available).
const KernelTable& active_kernels();

void outer_accumulate(std::span<std::complex<double>> acc, std::span<const std::complex<double>> u,
                      std::span<const std::complex<double>> v, std::complex<double> weight);
void abs2(std::span<const std::complex<double>> in, std::span<double> out);
double sqrt_product_sum(std::span<const double> a, std::span<const double> b);

namespace detail {
extern const KernelTable scalar_table;
#if defined(SPDCWALK_HAVE_AVX2_KERNELS)
extern const KernelTable avx2_table;
#endif
}  // namespace detail

}  // namespace spdcwalk::simd
