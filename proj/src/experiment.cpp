#include "spdcwalk/experiment.hpp"

#include "spdcwalk/errors.hpp"
#include "spdcwalk/heatmap.hpp"
#include "spdcwalk/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace spdcwalk::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where.empty() ? what : where + ": " + what);
}

std::string join(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) fail(where, "expected an object");
    for (const auto& item : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            fail(join(where, item.key()), "unknown key");
        }
    }
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(where, "must be finite");
    return x;
}

double as_positive(const json& v, const std::string& where) {
    const double x = as_number(v, where);
    if (!(x > 0.0)) fail(where, "must be positive");
    return x;
}

long long as_integer(const json& v, const std::string& where) {
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float()) {
        const double x = v.get<double>();
        if (std::isfinite(x) && x == std::floor(x) && std::fabs(x) < 9e15) return static_cast<long long>(x);
    }
    fail(where, "expected an integer");
}

int as_int(const json& v, const std::string& where) {
    const long long x = as_integer(v, where);
    if (x < -1000000 || x > 1000000) fail(where, "out of range");
    return static_cast<int>(x);
}

bool as_bool(const json& v, const std::string& where) {
    if (!v.is_boolean()) fail(where, "expected true or false");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& where) {
    if (!v.is_string()) fail(where, "expected a string");
    return v.get<std::string>();
}

const json* find(const json& obj, std::string_view key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

ExperimentKind parse_kind(const std::string& text) {
    for (ExperimentKind k : {ExperimentKind::CorrelationMap, ExperimentKind::PhaseSweep, ExperimentKind::SchmidtCurve,
                             ExperimentKind::InjectedEvolution, ExperimentKind::ViolationReport}) {
        if (kind_name(k) == text) return k;
    }
    fail("kind", "unknown experiment kind '" + text + "'");
}

void parse_geometry(const json& g, ExperimentConfig& cfg) {
    check_keys(g, "geometry", {"coupling", "length", "coupling_length", "model", "num_guides", "window_halfwidth"});
    if (const json* v = find(g, "coupling")) cfg.geometry.coupling = as_positive(*v, "geometry.coupling");
    const json* length = find(g, "length");
    const json* cl = find(g, "coupling_length");
    if (cfg.kind == ExperimentKind::SchmidtCurve) {
        if (length || cl) fail("geometry", "schmidt-curve takes its lengths from length_grid");
    } else {
        if (length && cl) fail("geometry", "give either length or coupling_length, not both");
        if (length) cfg.geometry.length = as_positive(*length, "geometry.length");
        if (cl) cfg.geometry.length = as_positive(*cl, "geometry.coupling_length") / cfg.geometry.coupling;
    }
    if (const json* v = find(g, "model")) {
        const std::string m = as_string(*v, "geometry.model");
        if (m == "infinite") {
            cfg.model = Model::InfiniteAnalytic;
        } else if (m == "finite") {
            cfg.model = Model::FiniteLattice;
        } else {
            fail("geometry.model", "expected \"infinite\" or \"finite\"");
        }
    }
    if (const json* v = find(g, "num_guides")) cfg.geometry.num_guides = as_int(*v, "geometry.num_guides");
    if (const json* v = find(g, "window_halfwidth"); v && !v->is_null()) {
        cfg.geometry.window_halfwidth = as_int(*v, "geometry.window_halfwidth");
    }
    if (cfg.geometry.num_guides < 1 || cfg.geometry.num_guides % 2 == 0) {
        fail("geometry.num_guides", "must be a positive odd number");
    }
    if (cfg.geometry.window_halfwidth && *cfg.geometry.window_halfwidth < 0) {
        fail("geometry.window_halfwidth", "must be non-negative");
    }
}

std::vector<PumpSpec> parse_pump(const json& p) {
    if (!p.is_array() || p.empty()) fail("pump", "expected a nonempty list of pump entries");
    std::vector<PumpSpec> out;
    std::set<int> seen;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const std::string where = "pump." + std::to_string(k);
        check_keys(p[k], where, {"guide", "magnitude", "phase", "free_phase"});
        PumpSpec spec;
        const json* guide = find(p[k], "guide");
        if (!guide) fail(where, "missing guide");
        spec.guide = as_int(*guide, where + ".guide");
        if (const json* v = find(p[k], "magnitude")) spec.magnitude = as_positive(*v, where + ".magnitude");
        if (const json* v = find(p[k], "phase")) spec.phase = as_number(*v, where + ".phase");
        if (const json* v = find(p[k], "free_phase")) spec.free_phase = as_bool(*v, where + ".free_phase");
        if (!seen.insert(spec.guide).second) fail(where + ".guide", "duplicate pump guide");
        out.push_back(spec);
    }
    return out;
}

std::vector<PairComponent> parse_injected(const json& p) {
    if (!p.is_array() || p.empty()) fail("injected", "expected a nonempty list of pair components");
    std::vector<PairComponent> out;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const std::string where = "injected." + std::to_string(k);
        check_keys(p[k], where, {"signal", "idler", "re", "im"});
        const json* s = find(p[k], "signal");
        const json* i = find(p[k], "idler");
        if (!s || !i) fail(where, "needs signal and idler");
        PairComponent c;
        c.signal = as_int(*s, where + ".signal");
        c.idler = as_int(*i, where + ".idler");
        double re = 1.0;
        double im = 0.0;
        if (const json* v = find(p[k], "re")) re = as_number(*v, where + ".re");
        if (const json* v = find(p[k], "im")) im = as_number(*v, where + ".im");
        c.amplitude = {re, im};
        out.push_back(c);
    }
    return out;
}

std::vector<double> parse_phases(const json* list, const json* grid) {
    if (list && grid) fail("phases", "give either phases or phase_grid, not both");
    if (!list && !grid) fail("phase_grid", "phase-sweep needs phases or phase_grid");
    std::vector<double> out;
    if (list) {
        if (!list->is_array() || list->empty()) fail("phases", "expected a nonempty list");
        for (std::size_t k = 0; k < list->size(); ++k) out.push_back(as_number((*list)[k], "phases." + std::to_string(k)));
        return out;
    }
    check_keys(*grid, "phase_grid", {"count", "offset"});
    const json* count = find(*grid, "count");
    if (!count) fail("phase_grid", "missing count");
    const long long n = as_integer(*count, "phase_grid.count");
    if (n < 1 || n > 100000) fail("phase_grid.count", "must be between 1 and 100000");
    double offset = 0.0;
    if (const json* v = find(*grid, "offset")) offset = as_number(*v, "phase_grid.offset");
    for (long long k = 0; k < n; ++k) out.push_back(offset + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    return out;
}

std::vector<double> parse_lengths(const json* list, const json* grid) {
    if (list && grid) fail("coupling_lengths", "give either coupling_lengths or length_grid, not both");
    if (!list && !grid) fail("length_grid", "schmidt-curve needs coupling_lengths or length_grid");
    std::vector<double> out;
    if (list) {
        if (!list->is_array() || list->empty()) fail("coupling_lengths", "expected a nonempty list");
        for (std::size_t k = 0; k < list->size(); ++k) {
            out.push_back(as_positive((*list)[k], "coupling_lengths." + std::to_string(k)));
        }
    } else {
        check_keys(*grid, "length_grid", {"start", "stop", "count"});
        const json* start = find(*grid, "start");
        const json* stop = find(*grid, "stop");
        const json* count = find(*grid, "count");
        if (!start || !stop || !count) fail("length_grid", "needs start, stop and count");
        const double a = as_positive(*start, "length_grid.start");
        const double b = as_positive(*stop, "length_grid.stop");
        const long long n = as_integer(*count, "length_grid.count");
        if (n < 1 || n > 100000) fail("length_grid.count", "must be between 1 and 100000");
        if (n == 1) {
            if (a != b) fail("length_grid", "a single point needs start == stop");
            out.push_back(a);
        } else {
            for (long long k = 0; k < n; ++k) {
                // Index-based so the endpoints are exact.
                out.push_back((a * static_cast<double>(n - 1 - k) + b * static_cast<double>(k)) / static_cast<double>(n - 1));
            }
        }
    }
    for (std::size_t k = 1; k < out.size(); ++k) {
        if (!(out[k] > out[k - 1])) fail("length_grid", "coupling lengths must be strictly increasing");
    }
    return out;
}

void forbid(const json& doc, ExperimentKind kind, std::initializer_list<std::string_view> keys) {
    for (auto key : keys) {
        if (doc.contains(key)) fail(std::string(key), "not used by kind " + std::string(kind_name(kind)));
    }
}

}  // namespace

std::string_view kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::CorrelationMap: return "correlation-map";
        case ExperimentKind::PhaseSweep: return "phase-sweep";
        case ExperimentKind::SchmidtCurve: return "schmidt-curve";
        case ExperimentKind::InjectedEvolution: return "injected-evolution";
        case ExperimentKind::ViolationReport: return "violation-report";
    }
    return "unknown";
}

PumpProfile ExperimentConfig::pump_profile() const {
    std::vector<PumpEntry> entries;
    for (const auto& p : pump) entries.push_back({p.guide, std::polar(p.magnitude, p.phase), p.free_phase});
    return PumpProfile(std::move(entries));
}

ExperimentConfig parse_config(const json& doc) {
    check_keys(doc, "", {"name", "description", "kind", "geometry", "pump", "injected", "gamma", "quadrature",
                         "readout", "phases", "phase_grid", "coupling_lengths", "length_grid", "probe",
                         "count_budget", "output_dir", "random_free"});
    ExperimentConfig cfg;
    const json* name = find(doc, "name");
    if (!name) fail("name", "missing");
    cfg.name = as_string(*name, "name");
    if (cfg.name.empty() || cfg.name.find_first_of("/\\") != std::string::npos || cfg.name == "." || cfg.name == "..") {
        fail("name", "must be a plain, nonempty file name");
    }
    if (const json* v = find(doc, "description")) cfg.description = as_string(*v, "description");
    const json* kind = find(doc, "kind");
    if (!kind) fail("kind", "missing");
    cfg.kind = parse_kind(as_string(*kind, "kind"));

    if (const json* v = find(doc, "random_free"); v && !as_bool(*v, "random_free")) {
        fail("random_free", "every computation is deterministic; there is no stochastic mode");
    }
    if (const json* g = find(doc, "geometry")) {
        parse_geometry(*g, cfg);
    } else {
        parse_geometry(json::object(), cfg);
    }
    if (cfg.kind == ExperimentKind::SchmidtCurve) cfg.geometry.length = 1.0;  // replaced per grid point

    if (const json* v = find(doc, "gamma")) cfg.spdc.gamma = as_positive(*v, "gamma");
    if (const json* q = find(doc, "quadrature")) {
        check_keys(*q, "quadrature", {"rel_tolerance", "nodes_per_panel", "max_panels"});
        if (const json* v = find(*q, "rel_tolerance")) cfg.spdc.quadrature.rel_tolerance = as_positive(*v, "quadrature.rel_tolerance");
        if (const json* v = find(*q, "nodes_per_panel")) {
            cfg.spdc.quadrature.nodes_per_panel = as_int(*v, "quadrature.nodes_per_panel");
            if (cfg.spdc.quadrature.nodes_per_panel < 1 || cfg.spdc.quadrature.nodes_per_panel > 64) {
                fail("quadrature.nodes_per_panel", "must be between 1 and 64");
            }
        }
        if (const json* v = find(*q, "max_panels")) {
            cfg.spdc.quadrature.max_panels = as_int(*v, "quadrature.max_panels");
            if (cfg.spdc.quadrature.max_panels < 1) fail("quadrature.max_panels", "must be positive");
        }
    }
    if (const json* v = find(doc, "readout")) {
        check_keys(*v, "readout", {"lo", "hi"});
        const json* lo = find(*v, "lo");
        const json* hi = find(*v, "hi");
        if (!lo || !hi) fail("readout", "needs lo and hi");
        GuideWindow w{as_int(*lo, "readout.lo"), as_int(*hi, "readout.hi")};
        if (w.lo > w.hi) fail("readout", "lo must not exceed hi");
        cfg.readout = w;
    }
    if (const json* v = find(doc, "output_dir")) cfg.output_dir = as_string(*v, "output_dir");

    const bool uses_pump = cfg.kind != ExperimentKind::InjectedEvolution;
    if (const json* p = find(doc, "pump")) {
        if (!uses_pump) fail("pump", "not used by kind injected-evolution");
        cfg.pump = parse_pump(*p);
    }
    if (const json* p = find(doc, "injected")) {
        if (cfg.kind != ExperimentKind::InjectedEvolution && cfg.kind != ExperimentKind::SchmidtCurve) {
            fail("injected", "not used by kind " + std::string(kind_name(cfg.kind)));
        }
        cfg.injected = parse_injected(*p);
    }

    switch (cfg.kind) {
        case ExperimentKind::CorrelationMap:
            forbid(doc, cfg.kind, {"phases", "phase_grid", "coupling_lengths", "length_grid", "probe", "count_budget"});
            if (cfg.pump.empty()) fail("pump", "correlation-map needs a pump");
            break;
        case ExperimentKind::PhaseSweep: {
            forbid(doc, cfg.kind, {"coupling_lengths", "length_grid", "count_budget", "readout"});
            if (cfg.pump.empty()) fail("pump", "phase-sweep needs a pump");
            if (std::count_if(cfg.pump.begin(), cfg.pump.end(), [](const PumpSpec& p) { return p.free_phase; }) != 1) {
                fail("pump", "phase-sweep needs exactly one entry with free_phase true");
            }
            cfg.phases = parse_phases(find(doc, "phases"), find(doc, "phase_grid"));
            if (const json* v = find(doc, "probe")) {
                if (!v->is_array() || v->size() != 2) fail("probe", "expected [signal, idler]");
                cfg.probe = {as_int((*v)[0], "probe.0"), as_int((*v)[1], "probe.1")};
            }
            break;
        }
        case ExperimentKind::SchmidtCurve:
            forbid(doc, cfg.kind, {"phases", "phase_grid", "probe", "count_budget", "readout"});
            if (cfg.pump.empty() && cfg.injected.empty()) fail("pump", "schmidt-curve needs a pump, injected state, or both");
            cfg.coupling_lengths = parse_lengths(find(doc, "coupling_lengths"), find(doc, "length_grid"));
            break;
        case ExperimentKind::InjectedEvolution:
            forbid(doc, cfg.kind, {"phases", "phase_grid", "coupling_lengths", "length_grid", "probe", "count_budget", "gamma", "quadrature"});
            if (cfg.injected.empty()) fail("injected", "injected-evolution needs an injected state");
            break;
        case ExperimentKind::ViolationReport:
            forbid(doc, cfg.kind, {"phases", "phase_grid", "coupling_lengths", "length_grid", "probe"});
            if (cfg.pump.empty()) fail("pump", "violation-report needs a pump");
            if (const json* v = find(doc, "count_budget")) {
                cfg.count_budget = as_integer(*v, "count_budget");
                if (cfg.count_budget < 1) fail("count_budget", "must be at least 1");
            }
            break;
    }

    try {
        cfg.geometry.validate();
        if (!cfg.pump.empty()) {
            const PumpProfile profile = cfg.pump_profile();
            const int extent = profile.extent();
            if (cfg.model == Model::FiniteLattice && 2 * extent + 1 > cfg.geometry.num_guides) {
                fail("pump", "pump guide outside the " + std::to_string(cfg.geometry.num_guides) + "-guide array");
            }
        }
    } catch (const InvalidInputError& e) {
        fail("geometry", e.what());
    }
    return cfg;
}

json load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
}

void apply_override(json& doc, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("override '" + std::string(assignment) + "' is not of the form key.path=value");
    }
    const std::string path(assignment.substr(0, eq));
    const std::string text(assignment.substr(eq + 1));

    std::vector<std::string> parts;
    std::stringstream ss(path);
    for (std::string part; std::getline(ss, part, '.');) {
        if (part.empty()) throw ConfigError("override path '" + path + "' has an empty segment");
        parts.push_back(part);
    }

    json* node = &doc;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const bool last = k + 1 == parts.size();
        const std::string& key = parts[k];
        if (node->is_array()) {
            std::size_t idx = 0;
            const auto res = std::from_chars(key.data(), key.data() + key.size(), idx);
            if (res.ec != std::errc{} || res.ptr != key.data() + key.size() || idx >= node->size()) {
                throw ConfigError("override path '" + path + "': no element '" + key + "'");
            }
            node = &(*node)[idx];
        } else if (node->is_object()) {
            if (!node->contains(key) && !last) {
                (*node)[key] = json::object();
            }
            node = &(*node)[key];
        } else {
            throw ConfigError("override path '" + path + "' descends into a scalar");
        }
    }
    if (node->is_object() || node->is_array()) {
        throw ConfigError("override path '" + path + "' does not name a scalar field");
    }
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    if (value.is_object() || value.is_array()) {
        throw ConfigError("override value for '" + path + "' must be a scalar");
    }
    *node = std::move(value);
}

// ---------------------------------------------------------------- running

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::string window_text(const GuideWindow& w) {
    return "[" + std::to_string(w.lo) + ", " + std::to_string(w.hi) + "] (" + std::to_string(w.size()) + " guides)";
}

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

class Summary {
public:
    void section(std::string_view title) { out_ << "\n[" << title << "]\n"; }
    void line(std::string_view key, const std::string& value) { out_ << key << ": " << value << '\n'; }
    void raw(const std::string& text) { out_ << text << '\n'; }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

void describe_quadrature(Summary& s, const QuadratureOptions& opts, const QuadratureReport& report) {
    s.line("quadrature", "composite Gauss-Legendre, " + std::to_string(opts.nodes_per_panel) + " nodes per panel");
    s.line("requested_rel_tolerance", num(opts.rel_tolerance));
    s.line("achieved_rel_tolerance", num(report.achieved_tolerance));
    s.line("panels", std::to_string(report.panels));
}

void describe_map(Summary& s, const CorrelationMatrix& gamma, const CorrelationMatrix& shown) {
    s.line("total_intensity_window", num(total_intensity(gamma)));
    s.line("readout_window", window_text(shown.window));
    s.line("readout_intensity", num(total_intensity(shown)));
    s.line("readout_diagonal_sum", num(diagonal_sum(shown)));
    s.line("readout_antidiagonal_sum", num(antidiagonal_sum(shown)));
    s.line("readout_max", num(shown.values.maxCoeff()));
}

CorrelationMatrix shown_matrix(const ExperimentConfig& cfg, const CorrelationMatrix& gamma) {
    return cfg.readout ? gamma.readout(*cfg.readout) : gamma;
}

GuideWindow injected_window(const ExperimentConfig& cfg, const ArrayGeometry& geometry) {
    if (cfg.model == Model::FiniteLattice) return geometry.lattice_window();
    int extent = 0;
    for (const auto& c : cfg.injected) extent = std::max({extent, std::abs(c.signal), std::abs(c.idler)});
    return infinite_window(geometry, extent);
}

void run_correlation_map(const ExperimentConfig& cfg, RunOutput& out, Summary& s) {
    const BiphotonState state = spdc_state(cfg.pump_profile(), cfg.geometry, cfg.model, cfg.spdc);
    const CorrelationMatrix gamma = correlation_matrix(state);
    const CorrelationMatrix shown = shown_matrix(cfg, gamma);

    out.artifacts.push_back({"gamma.txt", matrix_text(gamma)});
    if (cfg.readout) out.artifacts.push_back({"gamma_readout.txt", matrix_text(shown)});
    out.artifacts.push_back({"heatmap.svg", heatmap_svg(shown, cfg.name)});

    s.section("numerics");
    s.line("computed_window", window_text(state.window));
    describe_quadrature(s, cfg.spdc.quadrature, state.quadrature);
    s.section("results");
    describe_map(s, gamma, shown);
    s.line("schmidt_number", num(schmidt_number(state)));
}

void run_phase_sweep(const ExperimentConfig& cfg, RunOutput& out, Summary& s) {
    const PhaseSweepSeries series =
        phase_sweep(cfg.pump_profile(), cfg.geometry, cfg.phases, cfg.model, cfg.spdc, cfg.probe);
    out.artifacts.push_back({"sweep.txt", table_text(io::sweep_table(series))});

    s.section("numerics");
    s.line("phase_points", std::to_string(cfg.phases.size()));
    describe_quadrature(s, cfg.spdc.quadrature, series.quadrature);
    s.section("results");
    s.line("probe_pair", "(" + std::to_string(cfg.probe.first) + ", " + std::to_string(cfg.probe.second) + ")");
    try {
        const VisibilityFit fit = fit_visibility(series);
        out.artifacts.push_back({"fit.txt", table_text({{"amplitude", "visibility", "phase_offset_rad", "residual_rms"},
                                                         {{fit.amplitude, fit.visibility, fit.phase_offset, fit.residual_rms}}})});
        s.line("fit_model", "a (1 + V cos(phi - phi0))");
        s.line("fit_amplitude", num(fit.amplitude));
        s.line("fit_visibility", num(fit.visibility));
        s.line("fit_phase_offset_rad", num(fit.phase_offset));
        s.line("fit_residual_rms", num(fit.residual_rms));
    } catch (const FitError& e) {
        s.line("fit", std::string("not available: ") + e.what());
    }
    double lo = series.samples.front().total;
    double hi = lo;
    for (const auto& p : series.samples) {
        lo = std::min(lo, p.total);
        hi = std::max(hi, p.total);
    }
    s.line("total_min", num(lo));
    s.line("total_max", num(hi));
}

void run_schmidt_curve(const ExperimentConfig& cfg, RunOutput& out, Summary& s) {
    const double C = cfg.geometry.coupling;
    const bool nonlinear = !cfg.pump.empty();
    const bool linear = !cfg.injected.empty();

    io::Table table{{"coupling_length", "length_mm"}, {}};
    if (nonlinear) table.columns.push_back("K_spdc");
    if (linear) table.columns.push_back("K_injected");

    std::optional<BiphotonState> input;
    ArrayGeometry outer = cfg.geometry;
    outer.length = cfg.coupling_lengths.back() / C;
    if (linear) input = injected_state(injected_window(cfg, outer), cfg.model, cfg.injected);

    QuadratureReport worst;
    std::optional<PumpProfile> pump;
    if (nonlinear) pump = cfg.pump_profile();
    for (double cl : cfg.coupling_lengths) {
        ArrayGeometry g = cfg.geometry;
        g.length = cl / C;
        std::vector<double> row{cl, g.length};
        if (nonlinear) {
            const BiphotonState st = spdc_state(*pump, g, cfg.model, cfg.spdc);
            if (st.quadrature.achieved_tolerance >= worst.achieved_tolerance) worst = st.quadrature;
            row.push_back(schmidt_number(st));
        }
        if (linear) row.push_back(schmidt_number(evolve_injected_state(*input, outer, g.length, cfg.model)));
        table.rows.push_back(std::move(row));
    }
    out.artifacts.push_back({"schmidt.txt", table_text(table)});

    s.section("numerics");
    s.line("length_points", std::to_string(cfg.coupling_lengths.size()));
    s.line("coupling_length_range", num(cfg.coupling_lengths.front()) + " to " + num(cfg.coupling_lengths.back()));
    if (nonlinear) describe_quadrature(s, cfg.spdc.quadrature, worst);
    s.section("results");
    for (std::size_t c = 2; c < table.columns.size(); ++c) {
        double lo = table.rows.front()[c];
        double hi = lo;
        bool increasing = true;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            lo = std::min(lo, table.rows[r][c]);
            hi = std::max(hi, table.rows[r][c]);
            if (r > 0 && !(table.rows[r][c] > table.rows[r - 1][c])) increasing = false;
        }
        s.line(table.columns[c] + "_range", num(lo) + " to " + num(hi));
        s.line(table.columns[c] + "_strictly_increasing", increasing ? "yes" : "no");
    }
}

void run_injected_evolution(const ExperimentConfig& cfg, RunOutput& out, Summary& s) {
    const BiphotonState input = injected_state(injected_window(cfg, cfg.geometry), cfg.model, cfg.injected);
    const BiphotonState state = evolve_injected_state(input, cfg.geometry, cfg.geometry.length, cfg.model);
    const CorrelationMatrix gamma = correlation_matrix(state);
    const CorrelationMatrix shown = shown_matrix(cfg, gamma);

    out.artifacts.push_back({"gamma.txt", matrix_text(gamma)});
    if (cfg.readout) out.artifacts.push_back({"gamma_readout.txt", matrix_text(shown)});
    out.artifacts.push_back({"heatmap.svg", heatmap_svg(shown, cfg.name)});

    s.section("numerics");
    s.line("computed_window", window_text(state.window));
    s.section("results");
    s.line("norm_squared", num(state.norm_squared()));
    s.line("schmidt_number_input", num(schmidt_number(input)));
    s.line("schmidt_number_output", num(schmidt_number(state)));
    describe_map(s, gamma, shown);
}

void run_violation_report(const ExperimentConfig& cfg, RunOutput& out, Summary& s) {
    const BiphotonState state = spdc_state(cfg.pump_profile(), cfg.geometry, cfg.model, cfg.spdc);
    const CorrelationMatrix shown = shown_matrix(cfg, correlation_matrix(state));
    const ViolationReport report = classical_bound_violations(shown, cfg.count_budget);

    io::Table table{{"n_s", "n_i", "gamma_si_counts", "bound_counts", "margin_counts", "significance_sigma"}, {}};
    for (const auto& r : report.records) {
        table.rows.push_back({static_cast<double>(r.signal), static_cast<double>(r.idler), r.off_diagonal, r.bound,
                              r.margin, r.significance.value_or(std::numeric_limits<double>::quiet_NaN())});
    }
    out.artifacts.push_back({"gamma_readout.txt", matrix_text(shown)});
    out.artifacts.push_back({"violations.txt", table_text(table)});
    out.artifacts.push_back({"heatmap.svg", heatmap_svg(shown, cfg.name)});

    s.section("numerics");
    s.line("computed_window", window_text(state.window));
    describe_quadrature(s, cfg.spdc.quadrature, state.quadrature);
    s.section("results");
    s.line("readout_window", window_text(shown.window));
    s.line("count_budget", std::to_string(cfg.count_budget));
    s.line("bound", "Gamma_si <= (2/3) sqrt(Gamma_ss Gamma_ii) for classical light");
    s.line("pairs_tested", std::to_string(report.records.size()));
    s.line("pairs_violating", std::to_string(report.violating_count()));
    s.line("max_significance_sigma", num(report.max_significance()));
}

}  // namespace

RunOutput compute_experiment(const ExperimentConfig& cfg) {
    RunOutput out;
    Summary s;
    s.raw("spdcwalk run summary");
    s.line("name", cfg.name);
    if (!cfg.description.empty()) s.line("description", cfg.description);
    s.line("kind", std::string(kind_name(cfg.kind)));
    s.line("units", "lengths mm, coupling mm^-1, angles rad, intensities unnormalized (gamma explicit)");

    s.section("geometry");
    s.line("coupling_per_mm", num(cfg.geometry.coupling));
    if (cfg.kind != ExperimentKind::SchmidtCurve) {
        s.line("length_mm", num(cfg.geometry.length));
        s.line("coupling_length", num(cfg.geometry.coupling_length()));
    }
    s.line("model", std::string(model_name(cfg.model)));
    if (cfg.model == Model::FiniteLattice) {
        s.line("num_guides", std::to_string(cfg.geometry.num_guides));
    } else {
        s.line("window_halfwidth", cfg.geometry.window_halfwidth ? std::to_string(*cfg.geometry.window_halfwidth)
                                                                 : std::string("auto (light cone + 12 + pump extent)"));
    }
    if (!cfg.pump.empty()) {
        s.section("pump");
        for (const auto& p : cfg.pump) {
            s.raw("guide " + std::to_string(p.guide) + ": magnitude " + num(p.magnitude) + ", phase_rad " + num(p.phase) +
                  (p.free_phase ? ", swept" : ""));
        }
        s.line("gamma", num(cfg.spdc.gamma));
    }
    if (!cfg.injected.empty()) {
        s.section("injected");
        for (const auto& c : cfg.injected) {
            s.raw("|" + std::to_string(c.signal) + ", " + std::to_string(c.idler) + ">: " + num(c.amplitude.real()) +
                  " + " + num(c.amplitude.imag()) + "i (before normalization)");
        }
    }

    switch (cfg.kind) {
        case ExperimentKind::CorrelationMap: run_correlation_map(cfg, out, s); break;
        case ExperimentKind::PhaseSweep: run_phase_sweep(cfg, out, s); break;
        case ExperimentKind::SchmidtCurve: run_schmidt_curve(cfg, out, s); break;
        case ExperimentKind::InjectedEvolution: run_injected_evolution(cfg, out, s); break;
        case ExperimentKind::ViolationReport: run_violation_report(cfg, out, s); break;
    }

    s.section("files");
    for (const auto& a : out.artifacts) s.raw(a.file);
    s.raw("summary.txt");
    out.summary = s.str();
    return out;
}

std::vector<std::filesystem::path> write_run(const RunOutput& output, const std::filesystem::path& run_directory) {
    std::vector<std::filesystem::path> written;
    for (const auto& a : output.artifacts) {
        io::write_file(run_directory / a.file, a.contents);
        written.push_back(run_directory / a.file);
    }
    io::write_file(run_directory / "summary.txt", output.summary);
    written.push_back(run_directory / "summary.txt");
    return written;
}

std::filesystem::path resolve_output_root(const std::optional<std::string>& flag, const ExperimentConfig& config) {
    if (flag && !flag->empty()) return *flag;
    if (config.output_dir && !config.output_dir->empty()) return *config.output_dir;
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
    return kDefaultOutputDir;
}

int exit_code_for_current_exception() {
    try {
        throw;
    } catch (const ConvergenceError&) {
        return kExitConvergence;
    } catch (const IoError&) {
        return kExitIo;
    } catch (const std::filesystem::filesystem_error&) {
        return kExitIo;
    } catch (const ConfigError&) {
        return kExitUsage;
    } catch (const InvalidInputError&) {
        return kExitUsage;
    } catch (const ShapeError&) {
        return kExitUsage;
    } catch (const DomainError&) {
        return kExitUsage;
    } catch (const UndefinedMeasureError&) {
        return kExitUsage;
    } catch (const FitError&) {
        return kExitUsage;
    } catch (...) {
        return 1;
    }
}

}  // namespace spdcwalk::cli
