#include "doctest.h"

#include "spdcwalk/errors.hpp"
#include "spdcwalk/lattice.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <limits>

using namespace spdcwalk;
using BigFloat = boost::multiprecision::cpp_bin_float_50;

namespace {

// Defining series sum_m (-1)^m (x/2)^{2m+k} / (m! (m+k)!) in 50-digit arithmetic; at
// x <= 30 the cancellation costs ~13 digits, leaving far more than double precision.
double series_oracle(int order, double x) {
    const BigFloat half = BigFloat(x) / 2;
    BigFloat term = 1;
    for (int j = 1; j <= order; ++j) term *= half / j;
    BigFloat sum = term;
    const BigFloat q = half * half;
    for (int m = 0; m < 400; ++m) {
        term *= -q / (BigFloat(m + 1) * BigFloat(m + 1 + order));
        sum += term;
        if (m > 30 && abs(term) < BigFloat("1e-45") * abs(sum)) break;
    }
    return sum.convert_to<double>();
}

}  // namespace

TEST_CASE("bessel_j: defining values") {
    CHECK(bessel_j(0, 0.0) == 1.0);
    CHECK(bessel_j(1, 0.0) == 0.0);
    CHECK(bessel_j(-3, 0.0) == 0.0);
    // J_0(1) from the power series, >= 30 terms
    CHECK(bessel_j(0, 1.0) == doctest::Approx(0.76519768655796655).epsilon(1e-14));
    CHECK(series_oracle(0, 1.0) == doctest::Approx(0.76519768655796655).epsilon(1e-15));
}

TEST_CASE("bessel_j: relative error <= 1e-12 against the series oracle") {
    const double xs[] = {0.05, 0.5, 1.0, 1.5, 1.999, 2.0, 2.5, 3.7, 5.0, 5.4, 7.3, 10.0, 10.8, 15.2, 20.0, 30.0};
    double worst = 0.0;
    for (double x : xs) {
        const auto seq = bessel_j_sequence(60, x);
        for (int k = 0; k <= 60; ++k) {
            const double expected = series_oracle(k, x);
            if (std::fabs(expected) < 1e-280) continue;  // outside double range for relative checks
            const double single = bessel_j(k, x);
            const double rel_single = std::fabs(single - expected) / std::fabs(expected);
            const double rel_seq = std::fabs(seq[static_cast<std::size_t>(k)] - expected) / std::fabs(expected);
            worst = std::max({worst, rel_single, rel_seq});
            INFO("k=" << k << " x=" << x << " expected=" << expected << " got=" << single);
            CHECK(rel_single <= 1e-12);
            CHECK(rel_seq <= 1e-12);
        }
    }
    MESSAGE("worst relative error " << worst);
}

TEST_CASE("bessel_j: reflection identities") {
    for (double x : {0.3, 2.2, 9.9}) {
        for (int k = 0; k <= 12; ++k) {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            CHECK(bessel_j(-k, x) == sign * bessel_j(k, x));
            CHECK(bessel_j(k, -x) == sign * bessel_j(k, x));
        }
    }
}

TEST_CASE("bessel_j: Neumann sum J_0^2 + 2 sum J_k^2 = 1") {
    for (double x : {0.7, 4.0, 10.0, 21.6}) {
        const auto seq = bessel_j_sequence(static_cast<int>(x) + 40, x);
        double sum = seq[0] * seq[0];
        for (std::size_t k = 1; k < seq.size(); ++k) sum += 2.0 * seq[k] * seq[k];
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("bessel_j: agrees with std::cyl_bessel_j") {
    for (double x : {0.25, 3.0, 12.5}) {
        for (int k = 0; k <= 8; ++k) {
            CHECK(bessel_j(k, x) == doctest::Approx(std::cyl_bessel_j(static_cast<double>(k), x)).epsilon(1e-11));
        }
    }
}

TEST_CASE("bessel_j: invalid input") {
    CHECK_THROWS_AS(bessel_j(0, std::numeric_limits<double>::quiet_NaN()), InvalidInputError);
    CHECK_THROWS_AS(bessel_j(2, std::numeric_limits<double>::infinity()), InvalidInputError);
    CHECK_THROWS_AS(bessel_j(500, 1.0), DomainError);
    CHECK_THROWS_AS(bessel_j_sequence(-1, 1.0), InvalidInputError);
}
