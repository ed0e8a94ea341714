#pragma once
// Config-driven experiment runs: JSON configuration, presets, and artifact generation.
//
// Lengths are in mm, couplings in mm^-1, angles in radians.

#include "spdcwalk/analysis.hpp"
#include "spdcwalk/biphoton.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spdcwalk::cli {

enum class ExperimentKind {
    CorrelationMap,
    PhaseSweep,
    SchmidtCurve,
    InjectedEvolution,
    ViolationReport,
};

std::string_view kind_name(ExperimentKind kind);

struct PumpSpec {
    int guide = 0;
    double magnitude = 1.0;
    double phase = 0.0;
    bool free_phase = false;
};

struct ExperimentConfig {
    std::string name;
    std::string description;
    ExperimentKind kind = ExperimentKind::CorrelationMap;
    ArrayGeometry geometry;
    Model model = Model::InfiniteAnalytic;
    std::vector<PumpSpec> pump;
    std::vector<PairComponent> injected;
    SpdcOptions spdc;
    std::optional<GuideWindow> readout;
    std::vector<double> phases;            // phase-sweep
    std::vector<double> coupling_lengths;  // schmidt-curve, values of C*L
    std::pair<int, int> probe{0, 1};
    std::int64_t count_budget = 100000;
    std::optional<std::string> output_dir;

    PumpProfile pump_profile() const;
};

// Throws ConfigError with a message naming the offending key.
ExperimentConfig parse_config(const nlohmann::json& document);

// Unreadable or malformed files raise ConfigError.
nlohmann::json load_config_file(const std::filesystem::path& path);

// Applies "dotted.path=value" to a scalar field. Array elements are addressed by index
// ("pump.1.phase=3.14"). Values are parsed as JSON, falling back to a plain string.
void apply_override(nlohmann::json& document, std::string_view assignment);

struct PresetInfo {
    std::string name;
    std::string description;
};
std::vector<PresetInfo> list_presets();
// Throws ConfigError for an unknown name.
nlohmann::json preset_document(std::string_view name);

struct Artifact {
    std::string file;  // relative to the run directory
    std::string contents;
};

struct RunOutput {
    std::vector<Artifact> artifacts;
    std::string summary;
};

// Computes every artifact in memory. Nothing touches the disk.
RunOutput compute_experiment(const ExperimentConfig& config);

// Writes the artifacts and summary.txt under <output_root>/<config.name>/ and returns the file paths.
std::vector<std::filesystem::path> write_run(const RunOutput& output, const std::filesystem::path& run_directory);

// Flag beats config beats $SPDCWALK_OUTPUT_DIR beats "spdcwalk-out".
std::filesystem::path resolve_output_root(const std::optional<std::string>& flag, const ExperimentConfig& config);

inline constexpr const char* kOutputDirEnv = "SPDCWALK_OUTPUT_DIR";
inline constexpr const char* kDefaultOutputDir = "spdcwalk-out";

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitConvergence = 3,
    kExitIo = 4,
};

// Maps the exception in flight (call from a catch block) to an exit code.
int exit_code_for_current_exception();

}  // namespace spdcwalk::cli
