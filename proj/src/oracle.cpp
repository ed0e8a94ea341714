#include "spdcwalk/oracle.hpp"

#include "spdcwalk/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace spdcwalk::oracle {

void OracleConfig::validate() const {
    if (z_steps < 100) {
        throw ConfigError("oracle: z_steps must be >= 100");
    }
    if (!std::isfinite(gamma) || gamma <= 0.0) {
        throw ConfigError("oracle: gamma must be positive");
    }
    if (lattice_size && (*lattice_size < 1 || *lattice_size % 2 == 0)) {
        throw ConfigError("oracle: lattice_size must be odd and >= 1");
    }
}

int OracleConfig::resolved_lattice_size(const ArrayGeometry& geometry, int source_extent) const {
    if (lattice_size) return *lattice_size;
    const int cone = static_cast<int>(std::ceil(2.0 * geometry.coupling * geometry.length));
    return 2 * cone + 21 + 2 * std::abs(source_extent);
}

namespace {

Eigen::MatrixXd hopping_matrix(double coupling, int size) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(size, size);
    for (int k = 0; k + 1 < size; ++k) {
        h(k, k + 1) = coupling;
        h(k + 1, k) = coupling;
    }
    return h;
}

ComplexMatrix taylor_scaled_squaring(const ComplexMatrix& a) {
    const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    double scaled = norm;
    while (scaled > 0.5) {
        scaled *= 0.5;
        ++squarings;
    }
    const ComplexMatrix x = a / std::ldexp(1.0, squarings);
    const auto n = a.rows();
    ComplexMatrix result = ComplexMatrix::Identity(n, n);
    ComplexMatrix term = ComplexMatrix::Identity(n, n);
    for (int k = 1; k <= 30; ++k) {
        term = term * x / static_cast<double>(k);
        result += term;
        if (term.cwiseAbs().maxCoeff() < 1e-20) break;
    }
    for (int s = 0; s < squarings; ++s) {
        result = result * result;
    }
    return result;
}

// Psi += weight * u u^T, plain loops.
void accumulate_pair(ComplexMatrix& psi, const Eigen::VectorXcd& u, Complex weight) {
    const auto n = u.size();
    for (Eigen::Index c = 0; c < n; ++c) {
        const Complex wc = weight * u(c);
        for (Eigen::Index r = 0; r < n; ++r) {
            psi(r, c) += wc * u(r);
        }
    }
}

}  // namespace

ComplexMatrix lattice_exponential(double coupling, int size, double t, Stepper stepper) {
    const Eigen::MatrixXd h = hopping_matrix(coupling, size);
    if (stepper == Stepper::ScaledSquaring) {
        return taylor_scaled_squaring(Complex(0.0, t) * h.cast<Complex>());
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    if (eig.info() != Eigen::Success) {
        throw ConvergenceError("oracle: dense eigen-solver failed", 0.0);
    }
    Eigen::VectorXcd phases(size);
    for (int k = 0; k < size; ++k) phases(k) = std::polar(1.0, t * eig.eigenvalues()(k));
    const ComplexMatrix v = eig.eigenvectors().cast<Complex>();
    return v * phases.asDiagonal() * v.transpose();
}

BiphotonState spdc_state(const PumpProfile& pump, const ArrayGeometry& geometry, const OracleConfig& config) {
    geometry.validate();
    config.validate();
    const int size = config.resolved_lattice_size(geometry, pump.extent());
    const GuideWindow window = GuideWindow::centered((size - 1) / 2);
    for (const auto& e : pump.entries()) {
        if (!window.contains(e.guide)) {
            throw InvalidInputError("oracle: pump guide " + std::to_string(e.guide) + " outside the oracle lattice");
        }
    }
    const double h = geometry.length / config.z_steps;
    const ComplexMatrix half_step = lattice_exponential(geometry.coupling, size, 0.5 * h, config.stepper);
    const ComplexMatrix step = lattice_exponential(geometry.coupling, size, h, config.stepper);

    BiphotonState state{window, ComplexMatrix::Zero(size, size), Model::FiniteLattice, config.gamma};
    for (const auto& e : pump.entries()) {
        // column of U at the first midpoint z = h/2, then advanced by one step at a time
        Eigen::VectorXcd u = half_step.col(window.offset(e.guide));
        const Complex weight = h * config.gamma * e.amplitude;
        for (int k = 0; k < config.z_steps; ++k) {
            accumulate_pair(state.amplitudes, u, weight);
            u = step * u;
        }
    }
    const ComplexMatrix t = state.amplitudes.transpose();
    state.amplitudes = (state.amplitudes + t) * 0.5;
    return state;
}

BiphotonState evolve_injected_state(const BiphotonState& input, const ArrayGeometry& geometry, double z,
                                    const OracleConfig& config) {
    geometry.validate();
    config.validate();
    const int extent = std::max(std::abs(input.window.lo), std::abs(input.window.hi));
    const int size = std::max(config.resolved_lattice_size(geometry, extent), static_cast<int>(2 * extent + 1));
    const GuideWindow window = GuideWindow::centered((size - 1) / 2);

    ComplexMatrix psi = ComplexMatrix::Zero(size, size);
    const auto n = static_cast<Eigen::Index>(input.window.size());
    psi.block(window.offset(input.window.lo), window.offset(input.window.lo), n, n) = input.amplitudes;

    if (!std::isfinite(z) || z < 0.0) {
        throw DomainError("oracle: z must be finite and non-negative");
    }
    const ComplexMatrix u = lattice_exponential(geometry.coupling, size, z, config.stepper);

    BiphotonState out{window, u * psi * u.transpose(), Model::FiniteLattice, input.gamma};
    return out;
}

double schmidt_number_from_purity(const ComplexMatrix& psi) {
    const ComplexMatrix rho = psi * psi.adjoint();
    const double trace = rho.trace().real();
    if (!(trace > 0.0)) {
        throw UndefinedMeasureError("oracle: zero state");
    }
    // Tr rho^2 = sum |rho_ij|^2 for Hermitian rho
    return trace * trace / rho.squaredNorm();
}

namespace {

void check_lengths(std::span<const double> lengths) {
    for (std::size_t k = 0; k < lengths.size(); ++k) {
        if (!std::isfinite(lengths[k]) || lengths[k] <= 0.0 || (k > 0 && lengths[k] <= lengths[k - 1])) {
            throw ConfigError("oracle: lengths must be positive and strictly increasing");
        }
    }
}

}  // namespace

std::vector<std::pair<double, double>> schmidt_curve(const PumpProfile& pump, const ArrayGeometry& geometry,
                                                     std::span<const double> lengths, const OracleConfig& config) {
    check_lengths(lengths);
    std::vector<std::pair<double, double>> curve;
    for (double length : lengths) {
        ArrayGeometry g = geometry;
        g.length = length;
        const BiphotonState state = spdc_state(pump, g, config);
        curve.emplace_back(length, schmidt_number_from_purity(state.amplitudes));
    }
    return curve;
}

std::vector<std::pair<double, double>> injected_schmidt_curve(const BiphotonState& input, const ArrayGeometry& geometry,
                                                              std::span<const double> lengths,
                                                              const OracleConfig& config) {
    check_lengths(lengths);
    std::vector<std::pair<double, double>> curve;
    for (double length : lengths) {
        ArrayGeometry g = geometry;
        g.length = length;
        const BiphotonState state = evolve_injected_state(input, g, length, config);
        curve.emplace_back(length, schmidt_number_from_purity(state.amplitudes));
    }
    return curve;
}

}  // namespace spdcwalk::oracle
