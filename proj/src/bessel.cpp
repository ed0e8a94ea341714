// Integer-order Bessel functions of the first kind.
//
// x < 2: direct power series. Otherwise Miller's downward recurrence
// J_{k-1} = (2k/x) J_k - J_{k+1}, started well above both the requested order
// and x, normalized with J_0 + 2 sum_k J_{2k} = 1. The recurrence runs in long
// double with periodic rescaling.

#include "spdcwalk/errors.hpp"
#include "spdcwalk/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spdcwalk {
namespace {

// J_order(x) for order >= 0, 0 < x < 2.
double bessel_series(int order, double x) {
    const long double half = static_cast<long double>(x) / 2.0L;
    long double lead = 1.0L;
    for (int j = 1; j <= order; ++j) {
        lead *= half / j;
    }
    const long double q = half * half;
    long double term = 1.0L;
    long double sum = 1.0L;
    for (int m = 0; m < 200; ++m) {
        term *= -q / (static_cast<long double>(m + 1) * static_cast<long double>(m + 1 + order));
        sum += term;
        if (std::fabs(term) < 1e-21L * std::fabs(sum)) break;
    }
    return static_cast<double>(lead * sum);
}

int miller_start(int max_order, double x) {
    const double top = std::max(static_cast<double>(max_order), std::ceil(x));
    int start = static_cast<int>(top) + 30 + static_cast<int>(std::ceil(std::sqrt(160.0 * std::max(top, 1.0))));
    return start + (start % 2);
}

std::vector<double> bessel_miller(int max_order, double x) {
    constexpr long double kHuge = 1e1000L;
    constexpr long double kRescale = 1e-1000L;

    const int start = miller_start(max_order, x);
    std::vector<long double> kept(static_cast<std::size_t>(max_order) + 1, 0.0L);
    const long double two_over_x = 2.0L / static_cast<long double>(x);

    long double above = 0.0L;  // J_{k+1}
    long double here = 1.0L;   // J_k, unnormalized, k = start
    long double even_sum = 0.0L;
    for (int k = start; k > 0; --k) {
        if (k <= max_order) kept[static_cast<std::size_t>(k)] = here;
        if (k % 2 == 0) even_sum += here;
        const long double below = static_cast<long double>(k) * two_over_x * here - above;
        above = here;
        here = below;
        if (std::fabs(here) > kHuge) {
            here *= kRescale;
            above *= kRescale;
            even_sum *= kRescale;
            for (auto& v : kept) v *= kRescale;
        }
    }
    kept[0] = here;
    const long double norm = here + 2.0L * even_sum;

    std::vector<double> out(kept.size());
    for (std::size_t k = 0; k < kept.size(); ++k) {
        out[k] = static_cast<double>(kept[k] / norm);
    }
    return out;
}

void check_argument(int order, double x) {
    if (!std::isfinite(x)) {
        throw InvalidInputError("bessel_j: argument must be finite");
    }
    if (std::abs(static_cast<double>(order)) > 10.0 * (std::fabs(x) + 20.0)) {
        throw DomainError("bessel_j: order " + std::to_string(order) + " exceeds sanity bound 10*(|x|+20)");
    }
}

}  // namespace

std::vector<double> bessel_j_sequence(int max_order, double x) {
    if (max_order < 0) {
        throw InvalidInputError("bessel_j_sequence: max_order must be non-negative");
    }
    check_argument(max_order, x);
    if (x < 0.0) {
        auto seq = bessel_j_sequence(max_order, -x);
        for (std::size_t k = 1; k < seq.size(); k += 2) seq[k] = -seq[k];
        return seq;
    }
    std::vector<double> out(static_cast<std::size_t>(max_order) + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    if (x < 2.0) {
        for (int k = 0; k <= max_order; ++k) out[static_cast<std::size_t>(k)] = bessel_series(k, x);
        return out;
    }
    return bessel_miller(max_order, x);
}

double bessel_j(int order, double x) {
    check_argument(order, x);
    const int k = std::abs(order);
    const bool flip = (order < 0 && k % 2 == 1) != (x < 0.0 && k % 2 == 1);
    const double ax = std::fabs(x);
    double value;
    if (ax == 0.0) {
        value = k == 0 ? 1.0 : 0.0;
    } else if (ax < 2.0) {
        value = bessel_series(k, ax);
    } else {
        value = bessel_miller(k, ax).back();
    }
    return flip ? -value : value;
}

}  // namespace spdcwalk
