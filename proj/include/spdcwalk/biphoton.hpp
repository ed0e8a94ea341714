#pragma once
// Two-photon amplitudes in the waveguide array.
//
// Psi(n_s, n_i) is the amplitude for one photon in guide n_s and the other in n_i. For a
// pair launched into guide n the linear-array state after a distance z is
//     phi_n(n_s, n_i, z) = U(n_s, n, z) U(n_i, n, z),
// and a continuously pumped array generates
//     Psi = gamma * sum_n A_n * integral_0^L phi_n(., ., z) dz.

#include "spdcwalk/lattice.hpp"
#include "spdcwalk/quadrature.hpp"

#include <span>
#include <utility>
#include <vector>

namespace spdcwalk {

struct PumpEntry {
    int guide = 0;
    Complex amplitude{1.0, 0.0};
    // Marks the entry whose phase is swept by phase_sweep.
    bool free_phase = false;
};

class PumpProfile {
public:
    // Throws InvalidInputError on duplicate guides, non-finite amplitudes or an all-zero pump.
    explicit PumpProfile(std::vector<PumpEntry> entries);

    static PumpProfile single(int guide, Complex amplitude = 1.0);
    // Equal-magnitude pumps in `first` and `second`; the second carries e^{i phase} and is the free one.
    static PumpProfile pair(int first, int second, double phase);

    const std::vector<PumpEntry>& entries() const { return entries_; }
    double total_power() const;
    // Largest |guide| among the entries.
    int extent() const;
    // Copy with the free-phase entry set to |A| e^{i phase}. Throws ConfigError unless exactly one
    // entry is marked free.
    PumpProfile with_phase(double phase) const;

private:
    std::vector<PumpEntry> entries_;
};

struct BiphotonState {
    GuideWindow window;
    ComplexMatrix amplitudes;  // rows n_s, columns n_i
    Model model = Model::InfiniteAnalytic;
    double gamma = 1.0;
    QuadratureReport quadrature;  // empty for states not produced by integration

    Complex at(int signal, int idler) const { return amplitudes(window.offset(signal), window.offset(idler)); }
    double norm_squared() const { return amplitudes.squaredNorm(); }
};

struct CorrelationMatrix {
    GuideWindow window;
    RealMatrix values;  // Gamma(n_s, n_i) = |Psi|^2, unnormalized

    double at(int signal, int idler) const { return values(window.offset(signal), window.offset(idler)); }
    // Sub-matrix over `sub`, which must lie inside this window.
    CorrelationMatrix readout(const GuideWindow& sub) const;
};

struct SpdcOptions {
    double gamma = 1.0;
    QuadratureOptions quadrature{};  // max_panel_width is replaced by pi/(4C) when unset
};

// Unit-norm superposition sum_k c_k |n_k, n_k'> symmetrized over exchange and normalized.
struct PairComponent {
    int signal = 0;
    int idler = 0;
    Complex amplitude{1.0, 0.0};
};
BiphotonState injected_state(const GuideWindow& window, Model model, std::span<const PairComponent> components);

// (|n n> + |m m> + ...)/sqrt(k) for the listed guides.
BiphotonState path_entangled_state(const GuideWindow& window, Model model, std::span<const int> guides);

// i^{n_s+n_i-2n} J_{n_s-n}(2Cz) J_{n_i-n}(2Cz) on the auto-sized infinite window.
BiphotonState linear_pair_state(int source, const ArrayGeometry& geometry, double z);

// Psi_out = U Psi_in U^T. For the finite model the input must live on the full lattice window;
// for the infinite model its support must stay a light cone away from the window edges.
BiphotonState evolve_injected_state(const BiphotonState& input, const ArrayGeometry& geometry, double z, Model model);

BiphotonState spdc_state(const PumpProfile& pump, const ArrayGeometry& geometry, Model model,
                         const SpdcOptions& options = {});

CorrelationMatrix correlation_matrix(const BiphotonState& state);

// K = 1 / sum p_k^2 with p_k the normalized squared singular values of Psi.
double schmidt_number(const BiphotonState& state);

double total_intensity(const CorrelationMatrix& gamma_matrix);

struct PhaseSample {
    double phase = 0.0;
    double cross = 0.0;  // Gamma at the probe pair
    double total = 0.0;  // sum of Gamma over the computed window
};

struct PhaseSweepSeries {
    int probe_signal = 0;
    int probe_idler = 1;
    std::vector<PhaseSample> samples;
    QuadratureReport quadrature;  // worst achieved tolerance over the samples
};

PhaseSweepSeries phase_sweep(const PumpProfile& pump_template, const ArrayGeometry& geometry,
                             std::span<const double> phases, Model model, const SpdcOptions& options = {},
                             std::pair<int, int> probe = {0, 1});

// Sum of Gamma over n_s = n_i.
double diagonal_sum(const CorrelationMatrix& gamma_matrix);
// Sum over n_s + n_i = window.lo + window.hi (the anti-diagonal through the window center).
double antidiagonal_sum(const CorrelationMatrix& gamma_matrix);

}  // namespace spdcwalk
