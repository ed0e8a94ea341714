#pragma once

#include "spdcwalk/biphoton.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace spdcwalk {

// One off-diagonal pair (n_s < n_i) tested against the classical-light inequality
// Gamma_si > (2/3) sqrt(Gamma_ss Gamma_ii).
struct ViolationRecord {
    int signal = 0;
    int idler = 0;
    double off_diagonal = 0.0;  // Gamma_si in counts
    double bound = 0.0;         // (2/3) sqrt(Gamma_ss Gamma_ii)
    double margin = 0.0;        // bound - Gamma_si; > 0 means the classical inequality fails
    // margin / sigma, first-order Poisson propagation. Absent when the bound is zero.
    std::optional<double> significance;

    bool violates() const { return margin > 0.0; }
};

struct ViolationReport {
    std::int64_t count_budget = 0;
    GuideWindow window;
    std::vector<ViolationRecord> records;

    std::size_t violating_count() const;
    // Largest significance among violating pairs; 0 when none violates.
    double max_significance() const;
};

// Rescales Gamma to `count_budget` total coincidences, then evaluates every pair.
ViolationReport classical_bound_violations(const CorrelationMatrix& gamma_matrix, std::int64_t count_budget);

// (sum sqrt(a b))^2 / (sum a * sum b), in [0, 1].
double similarity(const CorrelationMatrix& a, const CorrelationMatrix& b);

// f(phi) = a (1 + V cos(phi - phi0))
struct VisibilityFit {
    double amplitude = 0.0;
    double visibility = 0.0;
    double phase_offset = 0.0;  // in [-pi, pi)
    double residual_rms = 0.0;

    double operator()(double phase) const;
};

enum class FitWeighting {
    Unweighted,
    // Weights 1/max(y, 1), treating samples as Poisson counts.
    Poisson,
};

VisibilityFit fit_visibility(std::span<const double> phases, std::span<const double> values,
                             FitWeighting weighting = FitWeighting::Unweighted);
VisibilityFit fit_visibility(const PhaseSweepSeries& series, FitWeighting weighting = FitWeighting::Unweighted);

}  // namespace spdcwalk
