#pragma once
// Single-photon propagation in a uniformly coupled waveguide array.
//
// Coupled-mode convention: d a_m/dz = i C (a_{m+1} + a_{m-1}), i.e. a(z) = exp(i z H) a(0)
// with H tridiagonal (zero diagonal, C on both off-diagonals). From a single guide n the
// infinite-lattice solution is a_m(z) = i^{m-n} J_{m-n}(2 C z), so each hop to a neighbor
// carries a +pi/2 phase.
//
// Units: coupling in mm^-1, lengths in mm. Only the product 2 C z enters the math.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace spdcwalk {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

enum class Model { InfiniteAnalytic, FiniteLattice };

const char* model_name(Model model);

// Contiguous range of guide indices [lo, hi], guide 0 being the array center.
struct GuideWindow {
    int lo = 0;
    int hi = 0;

    static GuideWindow centered(int halfwidth) { return {-halfwidth, halfwidth}; }

    std::size_t size() const { return static_cast<std::size_t>(hi - lo + 1); }
    bool contains(int guide) const { return guide >= lo && guide <= hi; }
    bool contains(const GuideWindow& other) const { return other.lo >= lo && other.hi <= hi; }
    // Row/column of a guide inside matrices defined on this window.
    Eigen::Index offset(int guide) const { return guide - lo; }

    friend bool operator==(const GuideWindow&, const GuideWindow&) = default;
};

struct ArrayGeometry {
    double coupling = 2.7;   // mm^-1
    double length = 2.0;     // mm
    int num_guides = 31;     // finite model only, odd
    // Half-width of the truncation window for the infinite model. Unset means auto-derived
    // from the light cone (see infinite_window).
    std::optional<int> window_halfwidth;

    // Throws InvalidInputError if any invariant is violated.
    void validate() const;

    double coupling_length() const { return coupling * length; }
    GuideWindow lattice_window() const { return GuideWindow::centered((num_guides - 1) / 2); }
};

// ceil(2 C z) + 12: beyond this many hops from the source the Bessel tail is below 1e-14.
int light_cone_halfwidth(double coupling, double z);

// Window used by the infinite model when sources occupy guides within |n| <= source_extent.
// Honors geometry.window_halfwidth when set.
GuideWindow infinite_window(const ArrayGeometry& geometry, int source_extent);

// Window for `model`: the whole lattice for the finite model, infinite_window otherwise.
GuideWindow model_window(const ArrayGeometry& geometry, Model model, int source_extent);

// --- Bessel functions of the first kind, integer order ---

// J_order(x). Negative orders use J_{-k} = (-1)^k J_k, negative x uses J_k(-x) = (-1)^k J_k(x).
double bessel_j(int order, double x);

// J_0(x) .. J_max_order(x) from a single downward recurrence.
std::vector<double> bessel_j_sequence(int max_order, double x);

// --- propagators ---

struct WalkPropagator {
    double z = 0.0;
    GuideWindow window;
    ComplexMatrix amplitudes;  // U(m, n): amplitude in guide m from a photon launched in guide n

    Complex operator()(int m, int n) const { return amplitudes(window.offset(m), window.offset(n)); }
};

// i^{m-n} J_{m-n}(2 C z); requires 0 <= z <= geometry.length.
Complex infinite_walk_amplitude(int m, int n, const ArrayGeometry& geometry, double z);

// Infinite-lattice propagator restricted to `window`.
WalkPropagator infinite_propagator(const ArrayGeometry& geometry, double z, const GuideWindow& window);

// exp(i z H) on the open-boundary lattice of geometry.num_guides guides, via the closed-form
// sine eigenbasis of the uniform tridiagonal H.
WalkPropagator finite_propagator(const ArrayGeometry& geometry, double z);

// exp(i z H) for a general real symmetric tridiagonal H (diagonal size N, off-diagonal N-1),
// via a numerical eigen-decomposition. Guides are indexed with 0 at the center.
WalkPropagator finite_propagator(std::span<const double> diagonal, std::span<const double> off_diagonal,
                                 double z);

// Closed-form eigenbasis of the uniform open-boundary lattice: eigenvalues 2C cos(k pi/(N+1)),
// modes sqrt(2/(N+1)) sin(j k pi/(N+1)). Build once, evaluate at many z.
class UniformLatticeModes {
public:
    explicit UniformLatticeModes(const ArrayGeometry& geometry);

    const GuideWindow& window() const { return window_; }
    ComplexMatrix propagator(double z) const;
    // Column `source` of propagator(z) in O(N^2).
    Eigen::VectorXcd column(double z, int source) const;

private:
    GuideWindow window_;
    Eigen::VectorXd spectrum_;
    Eigen::MatrixXd modes_;
};

// Column `source` of finite_propagator(geometry, z), without forming the full matrix.
Eigen::VectorXcd finite_propagator_column(const ArrayGeometry& geometry, double z, int source);

// Column `source` of the infinite propagator on `window`, given J_0..J_k(2Cz) for k >= the
// largest |m - source| in the window.
void infinite_column(std::span<const double> bessel, int source, const GuideWindow& window,
                     std::span<Complex> out);

// i^k for any integer k, exactly.
Complex i_power(int k);

}  // namespace spdcwalk
