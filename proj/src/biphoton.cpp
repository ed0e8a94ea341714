#include "spdcwalk/biphoton.hpp"

#include "spdcwalk/errors.hpp"
#include "spdcwalk/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <string>

namespace spdcwalk {

// ---------------------------------------------------------------- pump

PumpProfile::PumpProfile(std::vector<PumpEntry> entries) : entries_(std::move(entries)) {
    std::set<int> seen;
    bool any_nonzero = false;
    for (const auto& e : entries_) {
        if (!std::isfinite(e.amplitude.real()) || !std::isfinite(e.amplitude.imag())) {
            throw InvalidInputError("pump: amplitude for guide " + std::to_string(e.guide) + " is not finite");
        }
        if (!seen.insert(e.guide).second) {
            throw InvalidInputError("pump: guide " + std::to_string(e.guide) + " listed twice");
        }
        any_nonzero = any_nonzero || std::abs(e.amplitude) > 0.0;
    }
    if (!any_nonzero) {
        throw InvalidInputError("pump: at least one guide needs a non-zero amplitude");
    }
}

PumpProfile PumpProfile::single(int guide, Complex amplitude) {
    return PumpProfile({PumpEntry{guide, amplitude, false}});
}

PumpProfile PumpProfile::pair(int first, int second, double phase) {
    return PumpProfile({PumpEntry{first, 1.0, false}, PumpEntry{second, std::polar(1.0, phase), true}});
}

double PumpProfile::total_power() const {
    double sum = 0.0;
    for (const auto& e : entries_) sum += std::norm(e.amplitude);
    return sum;
}

int PumpProfile::extent() const {
    int extent = 0;
    for (const auto& e : entries_) extent = std::max(extent, std::abs(e.guide));
    return extent;
}

PumpProfile PumpProfile::with_phase(double phase) const {
    const auto free_count = std::count_if(entries_.begin(), entries_.end(), [](const auto& e) { return e.free_phase; });
    if (free_count != 1) {
        throw ConfigError("pump template must mark exactly one entry as free_phase (found " +
                          std::to_string(free_count) + ")");
    }
    auto entries = entries_;
    for (auto& e : entries) {
        if (e.free_phase) e.amplitude = std::polar(std::abs(e.amplitude), phase);
    }
    return PumpProfile(std::move(entries));
}

// ---------------------------------------------------------------- matrices

CorrelationMatrix CorrelationMatrix::readout(const GuideWindow& sub) const {
    if (!window.contains(sub) || sub.lo > sub.hi) {
        throw ShapeError("readout window [" + std::to_string(sub.lo) + ", " + std::to_string(sub.hi) +
                         "] not inside [" + std::to_string(window.lo) + ", " + std::to_string(window.hi) + "]");
    }
    const auto n = static_cast<Eigen::Index>(sub.size());
    return {sub, values.block(window.offset(sub.lo), window.offset(sub.lo), n, n)};
}

namespace {

void symmetrize(ComplexMatrix& m) {
    // (a + b)/2 is bitwise identical for both orderings.
    const ComplexMatrix t = m.transpose();
    m = (m + t) * 0.5;
}

bool is_exactly_symmetric(const ComplexMatrix& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = c + 1; r < m.rows(); ++r) {
            if (m(r, c) != m(c, r)) return false;
        }
    }
    return true;
}

}  // namespace

BiphotonState injected_state(const GuideWindow& window, Model model, std::span<const PairComponent> components) {
    const auto n = static_cast<Eigen::Index>(window.size());
    BiphotonState state{window, ComplexMatrix::Zero(n, n), model};
    for (const auto& c : components) {
        if (!window.contains(c.signal) || !window.contains(c.idler)) {
            throw ShapeError("injected component outside the state window");
        }
        state.amplitudes(window.offset(c.signal), window.offset(c.idler)) += c.amplitude;
        if (c.signal != c.idler) {
            state.amplitudes(window.offset(c.idler), window.offset(c.signal)) += c.amplitude;
        }
    }
    const double norm = std::sqrt(state.norm_squared());
    if (norm == 0.0) {
        throw InvalidInputError("injected state has zero norm");
    }
    state.amplitudes /= norm;
    return state;
}

BiphotonState path_entangled_state(const GuideWindow& window, Model model, std::span<const int> guides) {
    std::vector<PairComponent> components;
    for (int g : guides) components.push_back({g, g, 1.0});
    return injected_state(window, model, components);
}

BiphotonState linear_pair_state(int source, const ArrayGeometry& geometry, double z) {
    if (!std::isfinite(z) || z < 0.0 || z > geometry.length) {
        throw DomainError("linear_pair_state: z outside [0, L]");
    }
    const GuideWindow window = infinite_window(geometry, source);
    if (!window.contains(source)) {
        throw ShapeError("linear_pair_state: source guide outside the window");
    }
    const auto n = static_cast<Eigen::Index>(window.size());
    const auto bessel = bessel_j_sequence(static_cast<int>(window.size()) - 1, 2.0 * geometry.coupling * z);
    std::vector<Complex> u(window.size());
    infinite_column(bessel, source, window, u);

    BiphotonState state{window, ComplexMatrix(n, n), Model::InfiniteAnalytic};
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index r = 0; r < n; ++r) {
            state.amplitudes(r, c) = u[static_cast<std::size_t>(r)] * u[static_cast<std::size_t>(c)];
        }
    }
    return state;
}

BiphotonState evolve_injected_state(const BiphotonState& input, const ArrayGeometry& geometry, double z, Model model) {
    if (!is_exactly_symmetric(input.amplitudes)) {
        throw InvalidInputError("evolve_injected_state: input amplitude is not exchange symmetric");
    }
    if (std::fabs(input.norm_squared() - 1.0) > 1e-10) {
        throw InvalidInputError("evolve_injected_state: input state is not normalized");
    }
    WalkPropagator propagator;
    if (model == Model::FiniteLattice) {
        geometry.validate();
        if (input.window != geometry.lattice_window()) {
            throw ShapeError("evolve_injected_state: finite model needs the state on the full lattice window");
        }
        if (!std::isfinite(z) || z < 0.0 || z > geometry.length) {
            throw DomainError("evolve_injected_state: z outside [0, L]");
        }
        propagator = finite_propagator(geometry, z);
    } else {
        const int margin = light_cone_halfwidth(geometry.coupling, z);
        const auto n = static_cast<Eigen::Index>(input.window.size());
        for (Eigen::Index c = 0; c < n; ++c) {
            for (Eigen::Index r = 0; r < n; ++r) {
                if (input.amplitudes(r, c) == Complex{}) continue;
                const int lo = input.window.lo + static_cast<int>(std::min(r, c));
                const int hi = input.window.lo + static_cast<int>(std::max(r, c));
                if (lo - margin < input.window.lo || hi + margin > input.window.hi) {
                    throw ShapeError("evolve_injected_state: window too narrow for the light cone at this z");
                }
            }
        }
        propagator = infinite_propagator(geometry, z, input.window);
    }
    const ComplexMatrix& u = propagator.amplitudes;
    BiphotonState out{input.window, u * input.amplitudes * u.transpose(), model, input.gamma};
    symmetrize(out.amplitudes);
    return out;
}

BiphotonState spdc_state(const PumpProfile& pump, const ArrayGeometry& geometry, Model model, const SpdcOptions& options) {
    geometry.validate();
    if (!std::isfinite(options.gamma) || options.gamma <= 0.0) {
        throw InvalidInputError("spdc_state: gamma must be positive");
    }
    const GuideWindow window = model_window(geometry, model, pump.extent());
    for (const auto& e : pump.entries()) {
        if (!window.contains(e.guide)) {
            throw InvalidInputError("spdc_state: pump guide " + std::to_string(e.guide) + " outside the array window");
        }
    }
    const auto n = static_cast<Eigen::Index>(window.size());
    const double two_c = 2.0 * geometry.coupling;
    std::vector<Complex> column(window.size());

    MatrixIntegrand integrand;
    std::optional<UniformLatticeModes> modes;
    if (model == Model::InfiniteAnalytic) {
        integrand = [&](double z, double weight, ComplexMatrix& acc) {
            const auto bessel = bessel_j_sequence(static_cast<int>(n) - 1, two_c * z);
            for (const auto& e : pump.entries()) {
                infinite_column(bessel, e.guide, window, column);
                simd::outer_accumulate({acc.data(), static_cast<std::size_t>(acc.size())}, column, column,
                                       weight * options.gamma * e.amplitude);
            }
        };
    } else {
        modes.emplace(geometry);
        integrand = [&](double z, double weight, ComplexMatrix& acc) {
            for (const auto& e : pump.entries()) {
                const Eigen::VectorXcd col = modes->column(z, e.guide);
                const std::span<const Complex> u(col.data(), col.size());
                simd::outer_accumulate({acc.data(), static_cast<std::size_t>(acc.size())}, u, u,
                                       weight * options.gamma * e.amplitude);
            }
        };
    }

    QuadratureOptions quad = options.quadrature;
    if (quad.max_panel_width <= 0.0) {
        quad.max_panel_width = std::numbers::pi / (4.0 * geometry.coupling);
    }
    BiphotonState state{window, ComplexMatrix::Zero(n, n), model, options.gamma};
    state.quadrature = integrate_composite(integrand, 0.0, geometry.length, quad, state.amplitudes);
    symmetrize(state.amplitudes);
    return state;
}

CorrelationMatrix correlation_matrix(const BiphotonState& state) {
    const auto n = state.amplitudes.rows();
    CorrelationMatrix out{state.window, RealMatrix(n, state.amplitudes.cols())};
    const auto count = static_cast<std::size_t>(state.amplitudes.size());
    simd::abs2({state.amplitudes.data(), count}, {out.values.data(), count});
    return out;
}

double schmidt_number(const BiphotonState& state) {
    const Eigen::BDCSVD<ComplexMatrix> svd(state.amplitudes);
    const Eigen::VectorXd s2 = svd.singularValues().array().square();
    const double total = s2.sum();
    if (!(total > 0.0)) {
        throw UndefinedMeasureError("schmidt_number: zero state");
    }
    const double purity = (s2 / total).array().square().sum();
    return 1.0 / purity;
}

double total_intensity(const CorrelationMatrix& gamma_matrix) {
    return gamma_matrix.values.sum();
}

double diagonal_sum(const CorrelationMatrix& gamma_matrix) {
    return gamma_matrix.values.diagonal().sum();
}

double antidiagonal_sum(const CorrelationMatrix& gamma_matrix) {
    return gamma_matrix.values.rowwise().reverse().diagonal().sum();
}

PhaseSweepSeries phase_sweep(const PumpProfile& pump_template, const ArrayGeometry& geometry,
                             std::span<const double> phases, Model model, const SpdcOptions& options,
                             std::pair<int, int> probe) {
    for (double phi : phases) {
        if (!std::isfinite(phi)) throw InvalidInputError("phase_sweep: phases must be finite");
    }
    pump_template.with_phase(0.0);  // validates the free-phase slot even for an empty grid

    PhaseSweepSeries series{probe.first, probe.second, {}};
    series.samples.reserve(phases.size());
    for (double phi : phases) {
        const BiphotonState state = spdc_state(pump_template.with_phase(phi), geometry, model, options);
        const CorrelationMatrix gamma = correlation_matrix(state);
        if (!gamma.window.contains(probe.first) || !gamma.window.contains(probe.second)) {
            throw DomainError("phase_sweep: probe pair outside the computed window");
        }
        series.samples.push_back({phi, gamma.at(probe.first, probe.second), total_intensity(gamma)});
        if (state.quadrature.achieved_tolerance >= series.quadrature.achieved_tolerance) {
            series.quadrature = state.quadrature;
        }
    }
    return series;
}

}  // namespace spdcwalk
