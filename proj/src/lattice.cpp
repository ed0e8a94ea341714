#include "spdcwalk/lattice.hpp"

#include "spdcwalk/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace spdcwalk {

const char* model_name(Model model) {
    return model == Model::InfiniteAnalytic ? "infinite" : "finite";
}

void ArrayGeometry::validate() const {
    if (!std::isfinite(coupling) || coupling <= 0.0) {
        throw InvalidInputError("geometry: coupling must be a finite positive number (mm^-1)");
    }
    if (!std::isfinite(length) || length < 0.0) {
        throw InvalidInputError("geometry: length must be finite and non-negative (mm)");
    }
    if (num_guides < 1 || num_guides % 2 == 0) {
        throw InvalidInputError("geometry: num_guides must be odd and >= 1, got " + std::to_string(num_guides));
    }
    if (window_halfwidth && *window_halfwidth < 0) {
        throw InvalidInputError("geometry: window_halfwidth must be >= 0");
    }
}

int light_cone_halfwidth(double coupling, double z) {
    return static_cast<int>(std::ceil(2.0 * coupling * z)) + 12;
}

GuideWindow infinite_window(const ArrayGeometry& geometry, int source_extent) {
    geometry.validate();
    if (geometry.window_halfwidth) {
        return GuideWindow::centered(*geometry.window_halfwidth);
    }
    return GuideWindow::centered(light_cone_halfwidth(geometry.coupling, geometry.length) + std::abs(source_extent));
}

GuideWindow model_window(const ArrayGeometry& geometry, Model model, int source_extent) {
    if (model == Model::FiniteLattice) {
        geometry.validate();
        return geometry.lattice_window();
    }
    return infinite_window(geometry, source_extent);
}

Complex i_power(int k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

namespace {

void check_distance(const ArrayGeometry& geometry, double z) {
    geometry.validate();
    if (!std::isfinite(z) || z < 0.0 || z > geometry.length) {
        throw DomainError("propagation distance z=" + std::to_string(z) + " outside [0, " +
                          std::to_string(geometry.length) + "] mm");
    }
}

// Eigenvalues 2C cos(k pi/(N+1)), k = 1..N, mirrored so that the spectrum is exactly
// symmetric about zero (and the middle one is exactly 0 for odd N).
Eigen::VectorXd uniform_spectrum(double coupling, int n) {
    Eigen::VectorXd lambda(n);
    for (int k = 1; k <= n; ++k) {
        const int mirror = n + 1 - k;
        if (k < mirror) {
            lambda(k - 1) = 2.0 * coupling * std::cos(k * std::numbers::pi / (n + 1));
        } else if (k == mirror) {
            lambda(k - 1) = 0.0;
        } else {
            lambda(k - 1) = -lambda(mirror - 1);
        }
    }
    return lambda;
}

Eigen::MatrixXd sine_modes(int n) {
    Eigen::MatrixXd modes(n, n);
    const double scale = std::sqrt(2.0 / (n + 1));
    for (int j = 1; j <= n; ++j) {
        for (int k = 1; k <= n; ++k) {
            modes(j - 1, k - 1) = scale * std::sin(static_cast<double>(j) * k * std::numbers::pi / (n + 1));
        }
    }
    return modes;
}

ComplexMatrix spectral_exponential(const Eigen::MatrixXd& modes, const Eigen::VectorXd& lambda, double z) {
    Eigen::VectorXcd phases(lambda.size());
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
        phases(k) = std::polar(1.0, z * lambda(k));
    }
    const ComplexMatrix left = modes.cast<Complex>() * phases.asDiagonal();
    return left * modes.transpose().cast<Complex>();
}

}  // namespace

Complex infinite_walk_amplitude(int m, int n, const ArrayGeometry& geometry, double z) {
    check_distance(geometry, z);
    const int hops = std::abs(m - n);
    // i^{m-n} J_{m-n} = i^{|m-n|} J_{|m-n|} since i^{-k} (-1)^k = i^k
    return i_power(hops) * bessel_j(hops, 2.0 * geometry.coupling * z);
}

void infinite_column(std::span<const double> bessel, int source, const GuideWindow& window, std::span<Complex> out) {
    for (int m = window.lo; m <= window.hi; ++m) {
        const int hops = std::abs(m - source);
        out[static_cast<std::size_t>(m - window.lo)] = i_power(hops) * bessel[static_cast<std::size_t>(hops)];
    }
}

WalkPropagator infinite_propagator(const ArrayGeometry& geometry, double z, const GuideWindow& window) {
    check_distance(geometry, z);
    const auto n = static_cast<Eigen::Index>(window.size());
    const auto bessel = bessel_j_sequence(static_cast<int>(n) - 1, 2.0 * geometry.coupling * z);
    WalkPropagator out{z, window, ComplexMatrix(n, n)};
    for (int src = window.lo; src <= window.hi; ++src) {
        infinite_column(bessel, src, window,
                        std::span<Complex>(out.amplitudes.col(window.offset(src)).data(), window.size()));
    }
    return out;
}

UniformLatticeModes::UniformLatticeModes(const ArrayGeometry& geometry)
    : window_((geometry.validate(), geometry.lattice_window())),
      spectrum_(uniform_spectrum(geometry.coupling, geometry.num_guides)),
      modes_(sine_modes(geometry.num_guides)) {}

ComplexMatrix UniformLatticeModes::propagator(double z) const {
    if (z == 0.0) {
        return ComplexMatrix::Identity(modes_.rows(), modes_.cols());
    }
    return spectral_exponential(modes_, spectrum_, z);
}

Eigen::VectorXcd UniformLatticeModes::column(double z, int source) const {
    if (!window_.contains(source)) {
        throw DomainError("finite propagator column: source guide " + std::to_string(source) + " outside the lattice");
    }
    const auto s = window_.offset(source);
    if (z == 0.0) {
        return Eigen::VectorXcd::Unit(modes_.rows(), s);
    }
    Eigen::VectorXcd weights(spectrum_.size());
    for (Eigen::Index k = 0; k < spectrum_.size(); ++k) {
        weights(k) = modes_(s, k) * std::polar(1.0, z * spectrum_(k));
    }
    return modes_.cast<Complex>() * weights;
}

WalkPropagator finite_propagator(const ArrayGeometry& geometry, double z) {
    if (!std::isfinite(z) || z < 0.0) {
        throw DomainError("finite_propagator: z must be finite and non-negative");
    }
    const UniformLatticeModes modes(geometry);
    return {z, modes.window(), modes.propagator(z)};
}

WalkPropagator finite_propagator(std::span<const double> diagonal, std::span<const double> off_diagonal, double z) {
    const auto n = static_cast<Eigen::Index>(diagonal.size());
    if (n < 1 || n % 2 == 0 || off_diagonal.size() + 1 != diagonal.size()) {
        throw InvalidInputError("finite_propagator: need odd N >= 1 diagonal entries and N-1 off-diagonal entries");
    }
    if (!std::isfinite(z) || z < 0.0) {
        throw DomainError("finite_propagator: z must be finite and non-negative");
    }
    const Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(diagonal.data(), n);
    Eigen::VectorXd sub(std::max<Eigen::Index>(n - 1, 0));
    for (Eigen::Index k = 0; k + 1 < n; ++k) sub(k) = off_diagonal[static_cast<std::size_t>(k)];

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("tridiagonal eigen-solver did not converge", 0.0);
    }
    return {z, GuideWindow::centered(static_cast<int>(n - 1) / 2),
            spectral_exponential(solver.eigenvectors(), solver.eigenvalues(), z)};
}

Eigen::VectorXcd finite_propagator_column(const ArrayGeometry& geometry, double z, int source) {
    if (!std::isfinite(z) || z < 0.0) {
        throw DomainError("finite_propagator_column: z must be finite and non-negative");
    }
    return UniformLatticeModes(geometry).column(z, source);
}

}  // namespace spdcwalk
