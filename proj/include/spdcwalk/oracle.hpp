#pragma once
// Brute-force reference path for verification only.
//
// Propagates on an explicit finite lattice by repeatedly applying a one-step propagator
// exp(i h H), and replaces the z-integral by a midpoint Riemann sum. No Bessel functions,
// no adaptive quadrature and no SIMD kernels are used here.

#include "spdcwalk/biphoton.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace spdcwalk::oracle {

enum class Stepper {
    Spectral,        // dense symmetric eigen-decomposition of H
    ScaledSquaring,  // Taylor series with scaling and squaring
};

struct OracleConfig {
    int z_steps = 4000;
    std::optional<int> lattice_size;  // odd; auto: 2 ceil(2CL) + 21 + 2 |pump extent|
    Stepper stepper = Stepper::Spectral;
    double gamma = 1.0;

    void validate() const;
    int resolved_lattice_size(const ArrayGeometry& geometry, int source_extent) const;
};

// exp(i t H) for the uniform open lattice of `size` guides with coupling C.
ComplexMatrix lattice_exponential(double coupling, int size, double t, Stepper stepper);

BiphotonState spdc_state(const PumpProfile& pump, const ArrayGeometry& geometry, const OracleConfig& config);

// Embeds `input` at the center of the oracle lattice and applies U(z) Psi U(z)^T.
BiphotonState evolve_injected_state(const BiphotonState& input, const ArrayGeometry& geometry, double z,
                                    const OracleConfig& config);

// (Tr rho)^2 / Tr rho^2 with rho = Psi Psi^dagger.
double schmidt_number_from_purity(const ComplexMatrix& psi);

// (L, K) for each physical length L (mm); lengths must be positive and increasing.
std::vector<std::pair<double, double>> schmidt_curve(const PumpProfile& pump, const ArrayGeometry& geometry,
                                                     std::span<const double> lengths, const OracleConfig& config);

std::vector<std::pair<double, double>> injected_schmidt_curve(const BiphotonState& input, const ArrayGeometry& geometry,
                                                              std::span<const double> lengths,
                                                              const OracleConfig& config);

}  // namespace spdcwalk::oracle
