#include "doctest.h"

#include "helpers.hpp"
#include "spdcwalk/errors.hpp"
#include "spdcwalk/experiment.hpp"
#include "spdcwalk/io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

using namespace spdcwalk;
using namespace spdcwalk::cli;
using nlohmann::json;

namespace {

json minimal_map() {
    return json::parse(R"({"name": "t", "kind": "correlation-map", "pump": [{"guide": 0}]})");
}

const Artifact& artifact(const RunOutput& out, const std::string& file) {
    for (const auto& a : out.artifacts)
        if (a.file == file) return a;
    FAIL("missing artifact " << file);
    throw std::logic_error("unreachable");
}

CorrelationMatrix matrix_from(const std::string& text) {
    std::stringstream buf(text);
    return io::read_matrix(buf);
}

io::Table table_from(const std::string& text) {
    std::stringstream buf(text);
    return io::read_table(buf);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunOutput run_preset(const std::string& name) { return compute_experiment(parse_config(preset_document(name))); }

}  // namespace

TEST_CASE("config: minimal correlation map takes device defaults") {
    const ExperimentConfig cfg = parse_config(minimal_map());
    CHECK(cfg.kind == ExperimentKind::CorrelationMap);
    CHECK(cfg.geometry.coupling == 2.7);
    CHECK(cfg.geometry.length == 2.0);
    CHECK(cfg.geometry.num_guides == 31);
    CHECK(cfg.model == Model::InfiniteAnalytic);
    CHECK(cfg.spdc.gamma == 1.0);
    CHECK(!cfg.readout);
}

TEST_CASE("config: coupling_length sets the length") {
    json doc = minimal_map();
    doc["geometry"] = {{"coupling", 2.4}, {"coupling_length", 6.0}, {"model", "finite"}, {"num_guides", 21}};
    const ExperimentConfig cfg = parse_config(doc);
    CHECK(cfg.geometry.length == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(cfg.model == Model::FiniteLattice);
    CHECK(cfg.geometry.num_guides == 21);
}

TEST_CASE("config: validation errors name the offending key") {
    auto rejects = [](json doc, const std::string& fragment) {
        try {
            parse_config(doc);
            FAIL("accepted config expected to fail on " << fragment);
        } catch (const ConfigError& e) {
            CHECK_MESSAGE(std::string(e.what()).find(fragment) != std::string::npos, e.what());
        }
    };
    json d = minimal_map();
    d["colour"] = 1;
    rejects(d, "colour");

    d = minimal_map();
    d.erase("kind");
    rejects(d, "kind");

    d = minimal_map();
    d["kind"] = "hologram";
    rejects(d, "hologram");

    d = minimal_map();
    d["geometry"] = {{"coupling", -1.0}};
    rejects(d, "geometry.coupling");

    d = minimal_map();
    d["geometry"] = {{"length", 2.0}, {"coupling_length", 5.0}};
    rejects(d, "geometry");

    d = minimal_map();
    d["geometry"] = {{"model", "ring"}};
    rejects(d, "geometry.model");

    d = minimal_map();
    d["geometry"] = {{"num_guides", 30}};
    rejects(d, "num_guides");

    d = minimal_map();
    d["pump"] = json::array({{{"guide", 0}}, {{"guide", 0}}});
    rejects(d, "duplicate");

    d = minimal_map();
    d["pump"][0]["magnitude"] = 0.0;
    rejects(d, "pump.0.magnitude");

    d = minimal_map();
    d["phase_grid"] = {{"count", 4}};
    rejects(d, "phase_grid");

    d = minimal_map();
    d["readout"] = {{"lo", 2}, {"hi", -2}};
    rejects(d, "readout");

    d = minimal_map();
    d["random_free"] = false;
    rejects(d, "random_free");

    d = minimal_map();
    d["name"] = "../escape";
    rejects(d, "name");

    d = minimal_map();
    d["geometry"] = {{"model", "finite"}, {"num_guides", 5}};
    d["pump"][0]["guide"] = 3;
    rejects(d, "pump");

    d = json::parse(R"({"name": "s", "kind": "phase-sweep", "phase_grid": {"count": 8},
                       "pump": [{"guide": 0, "free_phase": true}, {"guide": 1, "free_phase": true}]})");
    rejects(d, "free_phase");

    d = json::parse(R"({"name": "s", "kind": "violation-report", "pump": [{"guide": 0}], "count_budget": 0})");
    rejects(d, "count_budget");

    d = json::parse(R"({"name": "s", "kind": "schmidt-curve", "pump": [{"guide": 0}],
                       "coupling_lengths": [1.0, 0.5]})");
    rejects(d, "increasing");

    d = json::parse(R"({"name": "s", "kind": "schmidt-curve", "pump": [{"guide": 0}],
                       "geometry": {"length": 2.0}, "coupling_lengths": [1.0]})");
    rejects(d, "length_grid");
}

TEST_CASE("config: grids") {
    json d = json::parse(R"({"name": "s", "kind": "phase-sweep", "phase_grid": {"count": 4},
                            "pump": [{"guide": 0}, {"guide": 1, "free_phase": true}]})");
    ExperimentConfig cfg = parse_config(d);
    REQUIRE(cfg.phases.size() == 4);
    CHECK(cfg.phases[0] == 0.0);
    CHECK(cfg.phases[2] == doctest::Approx(std::numbers::pi).epsilon(1e-15));

    d = json::parse(R"({"name": "s", "kind": "schmidt-curve", "injected": [{"signal": 0, "idler": 0}],
                       "length_grid": {"start": 0.1, "stop": 5.0, "count": 50}})");
    cfg = parse_config(d);
    REQUIRE(cfg.coupling_lengths.size() == 50);
    CHECK(cfg.coupling_lengths.front() == 0.1);
    CHECK(cfg.coupling_lengths.back() == 5.0);
}

TEST_CASE("overrides: dotted paths into objects and arrays") {
    json doc = preset_document("fig2e");
    apply_override(doc, "geometry.coupling=2.4");
    apply_override(doc, "pump.0.magnitude=0.5");
    apply_override(doc, "geometry.model=finite");
    apply_override(doc, "quadrature.rel_tolerance=1e-10");
    CHECK(doc["geometry"]["coupling"] == 2.4);
    CHECK(doc["pump"][0]["magnitude"] == 0.5);
    CHECK(doc["geometry"]["model"] == "finite");
    const ExperimentConfig cfg = parse_config(doc);
    CHECK(cfg.geometry.coupling == 2.4);
    CHECK(cfg.model == Model::FiniteLattice);
    CHECK(cfg.spdc.quadrature.rel_tolerance == 1e-10);

    CHECK_THROWS_AS(apply_override(doc, "geometry"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "=3"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "geometry=3"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "pump=3"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "pump.7.phase=3"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "pump.x.phase=3"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "geometry.coupling.x=3"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "geometry..coupling=3"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "geometry.coupling=[1,2]"), ConfigError);
}

TEST_CASE("config files: unreadable and malformed inputs are usage errors") {
    test::ScratchDir dir("cfg");
    CHECK_THROWS_AS(load_config_file(dir.path() / "missing.json"), ConfigError);
    io::write_file(dir.path() / "bad.json", "{\"name\": ");
    CHECK_THROWS_AS(load_config_file(dir.path() / "bad.json"), ConfigError);
    io::write_file(dir.path() / "good.json", minimal_map().dump());
    CHECK(parse_config(load_config_file(dir.path() / "good.json")).name == "t");
}

TEST_CASE("presets: every preset parses and is listed") {
    const auto presets = list_presets();
    std::vector<std::string> names;
    for (const auto& p : presets) {
        names.push_back(p.name);
        CHECK(!p.description.empty());
        CHECK(parse_config(preset_document(p.name)).name == p.name);
    }
    for (const char* required : {"fig1d", "fig1e", "fig1f", "fig2b", "fig2c", "fig2d", "fig2e"}) {
        CHECK(std::find(names.begin(), names.end(), required) != names.end());
    }
    CHECK_THROWS_AS(preset_document("fig9z"), ConfigError);
}

TEST_CASE("output root precedence: flag, config, environment, default") {
    ExperimentConfig cfg = parse_config(minimal_map());
    ::unsetenv(kOutputDirEnv);
    CHECK(resolve_output_root(std::nullopt, cfg) == kDefaultOutputDir);
    ::setenv(kOutputDirEnv, "/tmp/from-env", 1);
    CHECK(resolve_output_root(std::nullopt, cfg) == "/tmp/from-env");
    cfg.output_dir = "from-config";
    CHECK(resolve_output_root(std::nullopt, cfg) == "from-config");
    CHECK(resolve_output_root(std::string("from-flag"), cfg) == "from-flag");
    ::unsetenv(kOutputDirEnv);
}

TEST_CASE("runs are deterministic and written files re-parse exactly") {
    test::ScratchDir dir("det");
    for (const char* name : {"fig2b", "fig2e", "fig2b-violations"}) {
        const RunOutput a = run_preset(name);
        const RunOutput b = run_preset(name);
        REQUIRE(a.artifacts.size() == b.artifacts.size());
        for (std::size_t k = 0; k < a.artifacts.size(); ++k) {
            CHECK(a.artifacts[k].file == b.artifacts[k].file);
            CHECK(a.artifacts[k].contents == b.artifacts[k].contents);
        }
        CHECK(a.summary == b.summary);

        const auto files_a = write_run(a, dir.path() / "a" / name);
        const auto files_b = write_run(b, dir.path() / "b" / name);
        for (std::size_t k = 0; k < files_a.size(); ++k) CHECK(slurp(files_a[k]) == slurp(files_b[k]));
    }

    const ExperimentConfig cfg = parse_config(preset_document("fig2b"));
    const CorrelationMatrix direct = correlation_matrix(spdc_state(cfg.pump_profile(), cfg.geometry, cfg.model, cfg.spdc));
    const auto files = write_run(compute_experiment(cfg), dir.path() / "c");
    const CorrelationMatrix back = io::read_matrix_file(dir.path() / "c" / "gamma.txt");
    CHECK(back.window == direct.window);
    CHECK((back.values.array() == direct.values.array()).all());
}

TEST_CASE("summary reports units, resolved parameters and achieved tolerance") {
    const RunOutput out = run_preset("fig2b");
    for (const char* needle : {"units: lengths mm, coupling mm^-1, angles rad", "coupling_per_mm: 2.7", "length_mm: 2",
                               "coupling_length: 5.4", "model: infinite", "achieved_rel_tolerance: ",
                               "requested_rel_tolerance: 1e-09", "computed_window: [-23, 23]"}) {
        CHECK_MESSAGE(out.summary.find(needle) != std::string::npos, needle);
    }
}

TEST_CASE("convergence failure surfaces before anything is written") {
    json doc = preset_document("fig2b");
    apply_override(doc, "quadrature.max_panels=1");
    CHECK_THROWS_AS(compute_experiment(parse_config(doc)), ConvergenceError);
}

TEST_CASE("fig2b: diagonal plus antidiagonal dominate, read from heatmap metadata") {
    const RunOutput out = run_preset("fig2b");
    const std::string& svg = artifact(out, "heatmap.svg").contents;
    static const std::regex re(R"re(data-ns="(-?\d+)" data-ni="(-?\d+)" data-value="([^"]+)")re");
    double lines = 0.0;
    double others = 0.0;
    int cells = 0;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
        const int s = std::stoi((*it)[1]);
        const int i = std::stoi((*it)[2]);
        const double v = io::parse_double((*it)[3].str());
        ++cells;
        if (s == i) lines += v;
        if (s == -i) lines += v;
        if (s != i && s != -i) others += v;
    }
    CHECK(cells == 25);
    CHECK(lines >= 3.0 * others);
}

TEST_CASE("fig2e: fringe visibility is one") {
    const RunOutput out = run_preset("fig2e");
    const io::Table fit = table_from(artifact(out, "fit.txt").contents);
    CHECK(std::fabs(fit.column("visibility")[0] - 1.0) <= 1e-6);
    CHECK(std::fabs(fit.column("phase_offset_rad")[0]) <= 1e-6);
    CHECK(table_from(artifact(out, "sweep.txt").contents).rows.size() == 24);
}

TEST_CASE("fig1f: injected curve flat at two, generated curve rising") {
    const RunOutput out = run_preset("fig1f");
    const io::Table t = table_from(artifact(out, "schmidt.txt").contents);
    const auto cl = t.column("coupling_length");
    const auto lin = t.column("K_injected");
    const auto gen = t.column("K_spdc");
    CHECK(cl.front() == 0.1);
    CHECK(cl.back() == 5.0);
    for (std::size_t k = 0; k < lin.size(); ++k) CHECK(std::fabs(lin[k] - 2.0) <= 1e-9);
    for (std::size_t k = 1; k < gen.size(); ++k) CHECK(gen[k] > gen[k - 1]);
    CHECK(gen.back() > 2.0);
}

TEST_CASE("presets agree with the oracle golden files") {
    const std::filesystem::path golden_root = std::filesystem::path(SPDCWALK_SOURCE_DIR) / "presets" / "golden";
    for (const auto& preset : list_presets()) {
        CAPTURE(preset.name);
        const RunOutput out = run_preset(preset.name);
        const auto dir = golden_root / preset.name;
        REQUIRE(std::filesystem::is_directory(dir));
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            const std::string file = entry.path().filename().string();
            CAPTURE(file);
            const std::string& produced = artifact(out, file).contents;
            if (file.rfind("gamma", 0) == 0) {
                const CorrelationMatrix expected = io::read_matrix_file(entry.path());
                const CorrelationMatrix got = matrix_from(produced);
                REQUIRE(got.window == expected.window);
                CHECK(similarity(got, expected) >= 0.9999);
                CHECK((got.values - expected.values).cwiseAbs().maxCoeff() <= 1e-6 * expected.values.maxCoeff());
            } else {
                const io::Table expected = io::read_table_file(entry.path());
                const io::Table got = table_from(produced);
                REQUIRE(got.columns == expected.columns);
                REQUIRE(got.rows.size() == expected.rows.size());
                for (std::size_t c = 0; c < got.columns.size(); ++c) {
                    const auto e = expected.column(got.columns[c]);
                    const auto g = got.column(got.columns[c]);
                    double scale = 0.0;
                    for (double v : e) if (std::isfinite(v)) scale = std::max(scale, std::fabs(v));
                    for (std::size_t r = 0; r < e.size(); ++r) {
                        if (std::isnan(e[r])) {
                            CHECK(std::isnan(g[r]));
                        } else {
                            CHECK(std::fabs(g[r] - e[r]) <= 1e-6 * scale);
                        }
                    }
                }
            }
        }
    }
}
