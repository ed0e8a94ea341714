// Writes the expected preset outputs computed by the independent oracle.
//
// usage: spdcwalk_golden <golden-dir> [preset ...]

#include "spdcwalk/errors.hpp"
#include "spdcwalk/experiment.hpp"
#include "spdcwalk/io.hpp"
#include "spdcwalk/oracle.hpp"

#include <algorithm>
#include <iostream>
#include <limits>
#include <sstream>

namespace {

using namespace spdcwalk;
using namespace spdcwalk::cli;

std::string matrix_text(const CorrelationMatrix& m) {
    std::ostringstream out;
    io::write_matrix(out, m);
    return out.str();
}

std::string table_text(const io::Table& t) {
    std::ostringstream out;
    io::write_table(out, t);
    return out.str();
}

oracle::OracleConfig oracle_config(const ExperimentConfig& cfg) {
    oracle::OracleConfig oc;
    oc.gamma = cfg.spdc.gamma;
    return oc;
}

CorrelationMatrix readout_of(const ExperimentConfig& cfg, const BiphotonState& state) {
    const CorrelationMatrix gamma = correlation_matrix(state);
    return cfg.readout ? gamma.readout(*cfg.readout) : gamma;
}

BiphotonState injected_input(const ExperimentConfig& cfg) {
    int extent = 0;
    for (const auto& c : cfg.injected) extent = std::max({extent, std::abs(c.signal), std::abs(c.idler)});
    return injected_state(GuideWindow::centered(extent), Model::FiniteLattice, cfg.injected);
}

std::vector<Artifact> golden_for(const ExperimentConfig& cfg) {
    const oracle::OracleConfig oc = oracle_config(cfg);
    std::vector<Artifact> out;
    switch (cfg.kind) {
        case ExperimentKind::CorrelationMap:
            out.push_back({"gamma_readout.txt", matrix_text(readout_of(cfg, oracle::spdc_state(cfg.pump_profile(), cfg.geometry, oc)))});
            break;
        case ExperimentKind::InjectedEvolution: {
            const BiphotonState st = oracle::evolve_injected_state(injected_input(cfg), cfg.geometry, cfg.geometry.length, oc);
            out.push_back({"gamma_readout.txt", matrix_text(readout_of(cfg, st))});
            break;
        }
        case ExperimentKind::ViolationReport: {
            const CorrelationMatrix m = readout_of(cfg, oracle::spdc_state(cfg.pump_profile(), cfg.geometry, oc));
            const ViolationReport report = classical_bound_violations(m, cfg.count_budget);
            io::Table t{{"n_s", "n_i", "gamma_si_counts", "bound_counts", "margin_counts", "significance_sigma"}, {}};
            for (const auto& r : report.records) {
                t.rows.push_back({static_cast<double>(r.signal), static_cast<double>(r.idler), r.off_diagonal, r.bound,
                                  r.margin, r.significance.value_or(std::numeric_limits<double>::quiet_NaN())});
            }
            out.push_back({"gamma_readout.txt", matrix_text(m)});
            out.push_back({"violations.txt", table_text(t)});
            break;
        }
        case ExperimentKind::PhaseSweep: {
            PhaseSweepSeries series{cfg.probe.first, cfg.probe.second, {}, {}};
            const PumpProfile pump = cfg.pump_profile();
            for (double phi : cfg.phases) {
                const CorrelationMatrix g = correlation_matrix(oracle::spdc_state(pump.with_phase(phi), cfg.geometry, oc));
                series.samples.push_back({phi, g.at(cfg.probe.first, cfg.probe.second), total_intensity(g)});
            }
            out.push_back({"sweep.txt", table_text(io::sweep_table(series))});
            break;
        }
        case ExperimentKind::SchmidtCurve: {
            std::vector<double> lengths;
            for (double cl : cfg.coupling_lengths) lengths.push_back(cl / cfg.geometry.coupling);
            ArrayGeometry g = cfg.geometry;
            g.length = lengths.back();
            io::Table t{{"coupling_length", "length_mm"}, {}};
            for (std::size_t k = 0; k < lengths.size(); ++k) t.rows.push_back({cfg.coupling_lengths[k], lengths[k]});
            if (!cfg.pump.empty()) {
                t.columns.push_back("K_spdc");
                const auto curve = oracle::schmidt_curve(cfg.pump_profile(), g, lengths, oc);
                for (std::size_t k = 0; k < curve.size(); ++k) t.rows[k].push_back(curve[k].second);
            }
            if (!cfg.injected.empty()) {
                t.columns.push_back("K_injected");
                const auto curve = oracle::injected_schmidt_curve(injected_input(cfg), g, lengths, oc);
                for (std::size_t k = 0; k < curve.size(); ++k) t.rows[k].push_back(curve[k].second);
            }
            out.push_back({"schmidt.txt", table_text(t)});
            break;
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: spdcwalk_golden <golden-dir> [preset ...]\n";
        return kExitUsage;
    }
    const std::filesystem::path root = argv[1];
    std::vector<std::string> names;
    for (int k = 2; k < argc; ++k) names.emplace_back(argv[k]);
    if (names.empty()) {
        for (const auto& p : list_presets()) names.push_back(p.name);
    }
    try {
        for (const auto& name : names) {
            const ExperimentConfig cfg = parse_config(preset_document(name));
            for (const auto& a : golden_for(cfg)) {
                io::write_file(root / name / a.file, a.contents);
                std::cout << (root / name / a.file).string() << '\n';
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "spdcwalk_golden: " << e.what() << '\n';
        return exit_code_for_current_exception();
    }
    return kExitOk;
}
