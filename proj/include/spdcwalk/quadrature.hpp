#pragma once
// Composite Gauss-Legendre integration of matrix-valued integrands.

#include "spdcwalk/lattice.hpp"

#include <functional>
#include <vector>

namespace spdcwalk {

struct GaussLegendreRule {
    std::vector<double> nodes;    // ascending, on [-1, 1]
    std::vector<double> weights;
};

// n-point rule; nodes from Newton iteration on P_n.
GaussLegendreRule gauss_legendre(int n);

struct QuadratureOptions {
    int nodes_per_panel = 16;
    // Relative Frobenius-norm change between successive refinements.
    double rel_tolerance = 1e-9;
    int max_panels = 1 << 14;
    // Initial panel width cap; <= 0 means a single initial panel.
    double max_panel_width = 0.0;
};

struct QuadratureReport {
    int panels = 0;
    long evaluations = 0;
    double achieved_tolerance = 0.0;
};

// Adds weight * f(z) into acc.
using MatrixIntegrand = std::function<void(double z, double weight, ComplexMatrix& acc)>;

// Integrates f over [a, b] into `result` (which must be pre-sized and is overwritten).
// Doubles the panel count until two successive estimates agree to rel_tolerance; throws
// ConvergenceError carrying the last achieved tolerance if max_panels is exceeded.
QuadratureReport integrate_composite(const MatrixIntegrand& f, double a, double b, const QuadratureOptions& options,
                                     ComplexMatrix& result);

}  // namespace spdcwalk
