#include "spdcwalk/errors.hpp"
#include "spdcwalk/experiment.hpp"

#include <string_view>

namespace spdcwalk::cli {

namespace {

struct EmbeddedPreset {
    std::string_view name;
    std::string_view text;
};

// Generated at configure time from presets/*.json.
constexpr EmbeddedPreset kPresets[] = {
#include "spdcwalk_presets.inc"
};

}  // namespace

std::vector<PresetInfo> list_presets() {
    std::vector<PresetInfo> out;
    for (const auto& p : kPresets) {
        const auto doc = nlohmann::json::parse(p.text);
        out.push_back({std::string(p.name), doc.value("description", std::string())});
    }
    return out;
}

nlohmann::json preset_document(std::string_view name) {
    for (const auto& p : kPresets) {
        if (p.name == name) {
            auto doc = nlohmann::json::parse(p.text);
            doc["name"] = std::string(name);
            return doc;
        }
    }
    throw ConfigError("unknown preset '" + std::string(name) + "' (see list-presets)");
}

}  // namespace spdcwalk::cli
