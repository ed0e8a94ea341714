#include "spdcwalk/analysis.hpp"

#include "spdcwalk/errors.hpp"
#include "spdcwalk/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spdcwalk {

std::size_t ViolationReport::violating_count() const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.violates(); }));
}

double ViolationReport::max_significance() const {
    double best = 0.0;
    for (const auto& r : records) {
        if (r.violates() && r.significance) best = std::max(best, *r.significance);
    }
    return best;
}

ViolationReport classical_bound_violations(const CorrelationMatrix& gamma_matrix, std::int64_t count_budget) {
    if (count_budget < 1) {
        throw ConfigError("classical_bound_violations: count budget must be >= 1");
    }
    const double total = total_intensity(gamma_matrix);
    if (!(total > 0.0)) {
        throw UndefinedMeasureError("classical_bound_violations: correlation matrix is zero");
    }
    const RealMatrix counts = gamma_matrix.values * (static_cast<double>(count_budget) / total);
    const GuideWindow& w = gamma_matrix.window;

    ViolationReport report{count_budget, w, {}};
    for (int s = w.lo; s <= w.hi; ++s) {
        for (int i = s + 1; i <= w.hi; ++i) {
            const double gss = counts(w.offset(s), w.offset(s));
            const double gii = counts(w.offset(i), w.offset(i));
            const double gsi = counts(w.offset(s), w.offset(i));
            ViolationRecord rec{s, i, gsi, 0.0, 0.0, std::nullopt};
            rec.bound = (2.0 / 3.0) * std::sqrt(gss * gii);
            rec.margin = rec.bound - gsi;
            if (gss * gii > 0.0) {
                // dD/dG_ss = (1/3) sqrt(G_ii/G_ss), dD/dG_ii = (1/3) sqrt(G_ss/G_ii), dD/dG_si = -1
                const double dss = (1.0 / 3.0) * std::sqrt(gii / gss);
                const double dii = (1.0 / 3.0) * std::sqrt(gss / gii);
                const double variance = dss * dss * gss + dii * dii * gii + gsi;
                rec.significance = rec.margin / std::sqrt(variance);
            }
            report.records.push_back(rec);
        }
    }
    return report;
}

double similarity(const CorrelationMatrix& a, const CorrelationMatrix& b) {
    if (a.window != b.window) {
        throw ShapeError("similarity: matrices live on different windows");
    }
    const double sa = total_intensity(a);
    const double sb = total_intensity(b);
    if (!(sa > 0.0) || !(sb > 0.0)) {
        throw UndefinedMeasureError("similarity: zero matrix");
    }
    const auto n = static_cast<std::size_t>(a.values.size());
    const double overlap = simd::sqrt_product_sum({a.values.data(), n}, {b.values.data(), n});
    return std::min(1.0, overlap * overlap / (sa * sb));
}

double VisibilityFit::operator()(double phase) const {
    return amplitude * (1.0 + visibility * std::cos(phase - phase_offset));
}

namespace {

double wrap_phase(double phi) {
    const double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(phi + std::numbers::pi, two_pi);
    if (r < 0.0) r += two_pi;
    return r - std::numbers::pi;
}

// Angular extent covered by the samples on the circle: 2pi minus the largest gap.
double circular_span(std::vector<double> wrapped) {
    std::sort(wrapped.begin(), wrapped.end());
    double largest_gap = wrapped.front() + 2.0 * std::numbers::pi - wrapped.back();
    for (std::size_t k = 1; k < wrapped.size(); ++k) {
        largest_gap = std::max(largest_gap, wrapped[k] - wrapped[k - 1]);
    }
    return 2.0 * std::numbers::pi - largest_gap;
}

}  // namespace

VisibilityFit fit_visibility(std::span<const double> phases, std::span<const double> values, FitWeighting weighting) {
    if (phases.size() != values.size()) {
        throw FitError("fit_visibility: phase and value counts differ");
    }
    std::vector<double> wrapped;
    for (double phi : phases) {
        if (!std::isfinite(phi)) throw FitError("fit_visibility: non-finite phase");
        const double w = wrap_phase(phi);
        const bool duplicate = std::any_of(wrapped.begin(), wrapped.end(), [&](double x) {
            const double d = std::fabs(x - w);
            return d < 1e-12 || std::fabs(d - 2.0 * std::numbers::pi) < 1e-12;
        });
        if (!duplicate) wrapped.push_back(w);
    }
    if (wrapped.size() < 4) {
        throw FitError("fit_visibility: need at least 4 distinct phases (mod 2pi)");
    }
    if (circular_span(wrapped) < std::numbers::pi - 1e-12) {
        throw FitError("fit_visibility: phases must span at least pi");
    }

    // y = a + b cos(phi) + c sin(phi)
    Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    for (std::size_t k = 0; k < phases.size(); ++k) {
        const Eigen::Vector3d row(1.0, std::cos(phases[k]), std::sin(phases[k]));
        const double w = weighting == FitWeighting::Poisson ? 1.0 / std::max(values[k], 1.0) : 1.0;
        normal += w * row * row.transpose();
        rhs += w * values[k] * row;
    }
    const Eigen::FullPivLU<Eigen::Matrix3d> lu(normal);
    if (lu.rank() < 3) {
        throw FitError("fit_visibility: degenerate design matrix");
    }
    const Eigen::Vector3d coef = lu.solve(rhs);
    const double a = coef(0);
    const double swing = std::hypot(coef(1), coef(2));

    VisibilityFit fit;
    fit.amplitude = a;
    if (swing == 0.0) {
        fit.visibility = 0.0;
        fit.phase_offset = 0.0;
    } else {
        if (!(a > 0.0)) {
            throw FitError("fit_visibility: fitted mean is not positive, visibility undefined");
        }
        fit.visibility = swing / a;
        fit.phase_offset = wrap_phase(std::atan2(coef(2), coef(1)));
    }
    double ss = 0.0;
    for (std::size_t k = 0; k < phases.size(); ++k) {
        const double r = values[k] - (a + coef(1) * std::cos(phases[k]) + coef(2) * std::sin(phases[k]));
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / static_cast<double>(phases.size()));
    return fit;
}

VisibilityFit fit_visibility(const PhaseSweepSeries& series, FitWeighting weighting) {
    std::vector<double> phases;
    std::vector<double> values;
    for (const auto& s : series.samples) {
        phases.push_back(s.phase);
        values.push_back(s.cross);
    }
    return fit_visibility(phases, values, weighting);
}

}  // namespace spdcwalk
