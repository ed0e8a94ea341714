#include "spdcwalk/simd/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace spdcwalk::simd {

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

bool cpu_supports(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2:
#if defined(SPDCWALK_HAVE_AVX2_KERNELS)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

const KernelTable& kernels_for(Isa isa) {
    if (!cpu_supports(isa)) {
        throw std::runtime_error("SIMD variant '" + std::string(isa_name(isa)) + "' unavailable on this build/CPU");
    }
    switch (isa) {
        case Isa::Scalar: return detail::scalar_table;
        case Isa::Avx2:
#if defined(SPDCWALK_HAVE_AVX2_KERNELS)
            return detail::avx2_table;
#else
            break;
#endif
    }
    return detail::scalar_table;
}

namespace {

const KernelTable& select_kernels() {
    const char* env = std::getenv("SPDCWALK_SIMD");
    const std::string choice = env ? env : "auto";
    if (choice == "scalar") return detail::scalar_table;
    if (choice == "avx2") return kernels_for(Isa::Avx2);
    if (choice != "auto" && !choice.empty()) {
        throw std::runtime_error("SPDCWALK_SIMD must be one of scalar, avx2, auto (got '" + choice + "')");
    }
    return cpu_supports(Isa::Avx2) ? kernels_for(Isa::Avx2) : detail::scalar_table;
}

}  // namespace

const KernelTable& active_kernels() {
    static const KernelTable& table = select_kernels();
    return table;
}

void outer_accumulate(std::span<std::complex<double>> acc, std::span<const std::complex<double>> u,
                      std::span<const std::complex<double>> v, std::complex<double> weight) {
    if (acc.size() != u.size() * v.size()) {
        throw std::invalid_argument("outer_accumulate: accumulator size does not match u.size() * v.size()");
    }
    active_kernels().outer_accumulate(acc.data(), u.data(), u.size(), v.data(), v.size(), weight);
}

void abs2(std::span<const std::complex<double>> in, std::span<double> out) {
    if (in.size() != out.size()) {
        throw std::invalid_argument("abs2: input and output sizes differ");
    }
    active_kernels().abs2(in.data(), out.data(), in.size());
}

double sqrt_product_sum(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("sqrt_product_sum: operand sizes differ");
    }
    return active_kernels().sqrt_product_sum(a.data(), b.data(), a.size());
}

}  // namespace spdcwalk::simd
