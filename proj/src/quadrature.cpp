#include "spdcwalk/quadrature.hpp"

#include "spdcwalk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

namespace spdcwalk {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
    double p0 = 1.0;
    double p1 = x;
    for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

GaussLegendreRule gauss_legendre(int n) {
    if (n < 1) {
        throw InvalidInputError("gauss_legendre: need at least one node");
    }
    GaussLegendreRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < (n + 1) / 2; ++k) {
        double x = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = legendre(n, x);
            const double dx = p / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        const double dp = legendre(n, x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(k)] = -x;
        rule.nodes[static_cast<std::size_t>(n - 1 - k)] = x;
        rule.weights[static_cast<std::size_t>(k)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - k)] = w;
    }
    if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

namespace {

void composite_pass(const MatrixIntegrand& f, const GaussLegendreRule& rule, double a, double b, int panels,
                    ComplexMatrix& acc) {
    acc.setZero();
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double left = a + p * width;
        const double mid = left + 0.5 * width;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            f(mid + 0.5 * width * rule.nodes[k], 0.5 * width * rule.weights[k], acc);
        }
    }
}

}  // namespace

QuadratureReport integrate_composite(const MatrixIntegrand& f, double a, double b, const QuadratureOptions& options,
                                     ComplexMatrix& result) {
    if (!(std::isfinite(a) && std::isfinite(b)) || b < a) {
        throw InvalidInputError("integrate_composite: need finite a <= b");
    }
    result.setZero();
    if (a == b) {
        return {};
    }
    const GaussLegendreRule rule = gauss_legendre(options.nodes_per_panel);

    int panels = 1;
    if (options.max_panel_width > 0.0) {
        panels = std::max(1, static_cast<int>(std::ceil((b - a) / options.max_panel_width)));
    }
    QuadratureReport report;
    ComplexMatrix previous(result.rows(), result.cols());
    composite_pass(f, rule, a, b, panels, previous);
    report.evaluations += static_cast<long>(panels) * options.nodes_per_panel;

    while (true) {
        const int refined = panels * 2;
        if (refined > options.max_panels) {
            std::ostringstream msg;
            msg << "composite Gauss-Legendre did not reach relative tolerance " << options.rel_tolerance
                << " within " << options.max_panels << " panels (achieved " << report.achieved_tolerance << ")";
            throw ConvergenceError(msg.str(), report.achieved_tolerance);
        }
        composite_pass(f, rule, a, b, refined, result);
        report.evaluations += static_cast<long>(refined) * options.nodes_per_panel;
        panels = refined;

        const double scale = result.norm();
        const double change = (result - previous).norm();
        report.achieved_tolerance = scale > 0.0 ? change / scale : change;
        report.panels = panels;
        if (report.achieved_tolerance < options.rel_tolerance) {
            return report;
        }
        previous = result;
    }
}

}  // namespace spdcwalk
