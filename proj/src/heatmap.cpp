#include "spdcwalk/heatmap.hpp"

#include "spdcwalk/errors.hpp"
#include "spdcwalk/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace spdcwalk {

namespace {

// Sampled from a perceptually ordered dark-to-bright map.
constexpr std::array<std::array<double, 3>, 6> kStops{{
    {0.267, 0.005, 0.329},
    {0.254, 0.265, 0.530},
    {0.164, 0.471, 0.558},
    {0.134, 0.658, 0.518},
    {0.478, 0.821, 0.318},
    {0.993, 0.906, 0.144},
}};

constexpr int kCell = 36;
constexpr int kLeft = 64;
constexpr int kTop = 48;
constexpr int kBarWidth = 18;
constexpr int kBarGap = 28;
constexpr int kBarLabel = 96;
constexpr int kBottom = 56;

std::string escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string heatmap_color(double t) {
    if (!(t > 0.0)) t = 0.0;
    if (t > 1.0) t = 1.0;
    const double pos = t * static_cast<double>(kStops.size() - 1);
    const auto k = std::min(static_cast<std::size_t>(pos), kStops.size() - 2);
    const double f = pos - static_cast<double>(k);
    char buf[8];
    int rgb[3];
    for (int c = 0; c < 3; ++c) {
        const double v = kStops[k][c] + f * (kStops[k + 1][c] - kStops[k][c]);
        rgb[c] = static_cast<int>(std::lround(255.0 * v));
    }
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    return buf;
}

std::string heatmap_svg(const CorrelationMatrix& matrix, std::string_view title) {
    const GuideWindow& w = matrix.window;
    const int n = w.size();
    if (n < 1 || matrix.values.rows() != n || matrix.values.cols() != n) {
        throw InvalidInputError("heatmap: matrix must be nonempty and match its window");
    }
    const double vmax = std::max(0.0, matrix.values.maxCoeff());
    const int grid = n * kCell;
    const int width = kLeft + grid + kBarGap + kBarWidth + kBarLabel;
    const int height = kTop + grid + kBottom;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\" data-max=\"" << io::format_double(vmax)
        << "\" data-lo=\"" << w.lo << "\" data-hi=\"" << w.hi << "\">\n";
    svg << "<style>text{font-family:sans-serif;font-size:12px}</style>\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    if (!title.empty()) {
        svg << "<text class=\"title\" x=\"" << kLeft + grid / 2 << "\" y=\"20\" text-anchor=\"middle\">"
            << escape(title) << "</text>\n";
    }

    svg << "<g class=\"cells\">\n";
    for (int s = w.lo; s <= w.hi; ++s) {
        for (int i = w.lo; i <= w.hi; ++i) {
            const double v = matrix.at(s, i);
            const double t = vmax > 0.0 ? v / vmax : 0.0;
            svg << "<rect class=\"cell\" x=\"" << kLeft + (i - w.lo) * kCell << "\" y=\""
                << kTop + (s - w.lo) * kCell << "\" width=\"" << kCell << "\" height=\"" << kCell
                << "\" fill=\"" << heatmap_color(t) << "\" data-ns=\"" << s << "\" data-ni=\"" << i
                << "\" data-value=\"" << io::format_double(v) << "\"/>\n";
        }
    }
    svg << "</g>\n";

    // Rows are n_s (top to bottom), columns are n_i.
    svg << "<g class=\"axes\">\n";
    for (int k = w.lo; k <= w.hi; ++k) {
        const int c = (k - w.lo) * kCell + kCell / 2;
        svg << "<text x=\"" << kLeft + c << "\" y=\"" << kTop + grid + 16 << "\" text-anchor=\"middle\">" << k
            << "</text>\n";
        svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + c + 4 << "\" text-anchor=\"end\">" << k
            << "</text>\n";
    }
    svg << "<text class=\"axis-label\" x=\"" << kLeft + grid / 2 << "\" y=\"" << kTop + grid + 40
        << "\" text-anchor=\"middle\">n_i</text>\n";
    svg << "<text class=\"axis-label\" x=\"18\" y=\"" << kTop + grid / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << kTop + grid / 2 << ")\">n_s</text>\n";
    svg << "</g>\n";

    const int bx = kLeft + grid + kBarGap;
    svg << "<defs><linearGradient id=\"colorbar\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">\n";
    for (std::size_t k = 0; k < kStops.size(); ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(kStops.size() - 1);
        svg << "<stop offset=\"" << t << "\" stop-color=\"" << heatmap_color(t) << "\"/>\n";
    }
    svg << "</linearGradient></defs>\n";
    svg << "<g class=\"colorbar\">\n";
    svg << "<rect x=\"" << bx << "\" y=\"" << kTop << "\" width=\"" << kBarWidth << "\" height=\"" << grid
        << "\" fill=\"url(#colorbar)\" stroke=\"#333333\"/>\n";
    svg << "<text x=\"" << bx + kBarWidth + 6 << "\" y=\"" << kTop + 10 << "\">" << io::format_double(vmax)
        << "</text>\n";
    svg << "<text x=\"" << bx + kBarWidth + 6 << "\" y=\"" << kTop + grid << "\">0</text>\n";
    svg << "</g>\n";
    svg << "</svg>\n";
    return svg.str();
}

void render_heatmap(const CorrelationMatrix& matrix, const std::filesystem::path& path, std::string_view title) {
    io::write_file(path, heatmap_svg(matrix, title));
}

}  // namespace spdcwalk
