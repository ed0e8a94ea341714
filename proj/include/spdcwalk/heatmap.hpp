#pragma once
// SVG heatmaps of correlation matrices. Each cell carries data-ns, data-ni and data-value
// attributes; the root element carries data-max.

#include "spdcwalk/biphoton.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace spdcwalk {

std::string heatmap_svg(const CorrelationMatrix& matrix, std::string_view title = {});

// Throws IoError when the path cannot be written, InvalidInputError for an empty matrix.
void render_heatmap(const CorrelationMatrix& matrix, const std::filesystem::path& path,
                    std::string_view title = {});

// Color for t in [0, 1], as "#rrggbb".
std::string heatmap_color(double t);

}  // namespace spdcwalk
