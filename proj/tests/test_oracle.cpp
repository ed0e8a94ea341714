#include "doctest.h"

#include "helpers.hpp"
#include "spdcwalk/analysis.hpp"
#include "spdcwalk/errors.hpp"
#include "spdcwalk/oracle.hpp"

#include <cmath>
#include <numbers>

using namespace spdcwalk;
using test::geometry_for;

namespace {

// max |a - b| over the central (2h+1)^2 block, relative to the largest |b| there
double central_deviation(const BiphotonState& a, const BiphotonState& b, int h) {
    double diff = 0.0;
    double scale = 0.0;
    for (int s = -h; s <= h; ++s) {
        for (int i = -h; i <= h; ++i) {
            diff = std::max(diff, std::abs(a.at(s, i) - b.at(s, i)));
            scale = std::max(scale, std::abs(b.at(s, i)));
        }
    }
    return diff / scale;
}

}  // namespace

TEST_CASE("oracle config validation") {
    oracle::OracleConfig c;
    c.z_steps = 99;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.lattice_size = 40;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    CHECK(c.resolved_lattice_size(geometry_for(5.0), 1) == 2 * 10 + 21 + 2);
}

TEST_CASE("oracle steppers agree") {
    for (double t : {0.01, 0.5, 2.0}) {
        const auto a = oracle::lattice_exponential(2.7, 21, t, oracle::Stepper::Spectral);
        const auto b = oracle::lattice_exponential(2.7, 21, t, oracle::Stepper::ScaledSquaring);
        CHECK(test::max_abs_diff(a, b) <= 1e-12);
        CHECK(test::max_abs_diff(a.adjoint() * a, ComplexMatrix::Identity(21, 21)) <= 1e-12);
    }
}

TEST_CASE("oracle: vanishing length concentrates on the pumped guides") {
    const auto g = geometry_for(1e-5);
    oracle::OracleConfig cfg;
    cfg.z_steps = 200;
    const auto gamma = correlation_matrix(oracle::spdc_state(PumpProfile::single(0), g, cfg));
    CHECK(gamma.at(0, 0) / total_intensity(gamma) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("oracle agrees with the main path and converges at second order") {
    ArrayGeometry g;  // C = 2.7, L = 2
    g.num_guides = 61;
    const auto pump = PumpProfile::pair(0, 1, 0.4);
    const auto reference = spdc_state(pump, g, Model::InfiniteAnalytic);

    oracle::OracleConfig coarse;
    coarse.z_steps = 1000;
    coarse.lattice_size = 61;
    oracle::OracleConfig fine = coarse;
    fine.z_steps = 2000;
    const auto a = oracle::spdc_state(pump, g, coarse);
    const auto b = oracle::spdc_state(pump, g, fine);
    const double da = central_deviation(a, reference, 5);
    const double db = central_deviation(b, reference, 5);
    CHECK(db <= 1e-4);
    CHECK(da / db == doctest::Approx(4.0).epsilon(0.05));

    // scaled-squaring stepper gives the same sums
    oracle::OracleConfig alt = coarse;
    alt.stepper = oracle::Stepper::ScaledSquaring;
    CHECK(central_deviation(oracle::spdc_state(pump, g, alt), a, 5) <= 1e-10);
}

TEST_CASE("oracle Schmidt curves") {
    const ArrayGeometry g = geometry_for(5.0);
    oracle::OracleConfig cfg;
    cfg.z_steps = 400;
    std::vector<double> lengths;
    for (double cl = 0.5; cl <= 5.0 + 1e-9; cl += 0.5) lengths.push_back(cl / g.coupling);

    const auto nonlinear = oracle::schmidt_curve(PumpProfile::single(0), g, lengths, cfg);
    for (std::size_t k = 1; k < nonlinear.size(); ++k) CHECK(nonlinear[k].second > nonlinear[k - 1].second);

    const int guides[] = {0, 1};
    const auto bell = path_entangled_state(GuideWindow::centered(1), Model::FiniteLattice, guides);
    for (const auto& [length, k] : oracle::injected_schmidt_curve(bell, g, lengths, cfg)) {
        CHECK(std::fabs(k - 2.0) <= 1e-8);
    }

    const double tiny[] = {1e-6};
    CHECK(oracle::schmidt_curve(PumpProfile::single(0), g, tiny, cfg)[0].second == doctest::Approx(1.0).epsilon(1e-9));

    const double unordered[] = {0.5, 0.2};
    CHECK_THROWS_AS(oracle::schmidt_curve(PumpProfile::single(0), g, unordered, cfg), ConfigError);
}

TEST_CASE("oracle and main-path correlation maps are similar") {
    ArrayGeometry g;
    const auto main = correlation_matrix(spdc_state(PumpProfile::single(0), g, Model::InfiniteAnalytic));
    oracle::OracleConfig cfg;
    cfg.lattice_size = 61;
    cfg.z_steps = 1000;
    const auto orc = correlation_matrix(oracle::spdc_state(PumpProfile::single(0), g, cfg));
    const GuideWindow centre = GuideWindow::centered(10);
    CHECK(similarity(main.readout(centre), orc.readout(centre)) >= 0.9999);
}
