// spdcwalk: run correlation experiments from JSON configs or built-in presets.

#include "spdcwalk/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace spdcwalk::cli;

int execute(nlohmann::json doc, const std::vector<std::string>& overrides, const std::optional<std::string>& out_flag) {
    for (const auto& o : overrides) apply_override(doc, o);
    const ExperimentConfig cfg = parse_config(doc);
    // Everything is computed before the first write, so a failed run leaves no partial output.
    const RunOutput output = compute_experiment(cfg);
    const auto dir = resolve_output_root(out_flag, cfg) / cfg.name;
    for (const auto& path : write_run(output, dir)) std::cout << path.string() << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Photon-pair correlations in coupled waveguide arrays"};
    app.require_subcommand(1);

    std::string config_path;
    std::string preset_name;
    std::vector<std::string> overrides;
    std::vector<std::string> set_flags;
    std::optional<std::string> out_dir;

    const std::string out_help = std::string("Output root; defaults to the config's output_dir, then $") +
                                 kOutputDirEnv + ", then ./" + kDefaultOutputDir;

    auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config file");
    run->add_option("config", config_path, "Config file")->required();
    run->add_option("overrides", overrides, "key.path=value overrides of scalar config fields");
    run->add_option("--set", set_flags, "key.path=value override (repeatable)");
    run->add_option("-o,--out", out_dir, out_help);

    auto* preset = app.add_subcommand("preset", "Run a built-in preset");
    preset->add_option("name", preset_name, "Preset name (see list-presets)")->required();
    preset->add_option("overrides", overrides, "key.path=value overrides of scalar config fields");
    preset->add_option("--set", set_flags, "key.path=value override (repeatable)");
    preset->add_option("-o,--out", out_dir, out_help);

    auto* list = app.add_subcommand("list-presets", "List built-in presets");

    auto* show = app.add_subcommand("show-preset", "Print a preset's config as JSON");
    show->add_option("name", preset_name, "Preset name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    overrides.insert(overrides.end(), set_flags.begin(), set_flags.end());
    try {
        if (*run) return execute(load_config_file(config_path), overrides, out_dir);
        if (*preset) return execute(preset_document(preset_name), overrides, out_dir);
        if (*list) {
            for (const auto& p : list_presets()) std::cout << p.name << "  " << p.description << '\n';
            return kExitOk;
        }
        if (*show) {
            std::cout << preset_document(preset_name).dump(2) << '\n';
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "spdcwalk: error: " << e.what() << '\n';
        return exit_code_for_current_exception();
    }
    return kExitUsage;
}
