#include "doctest.h"

#include "helpers.hpp"
#include "spdcwalk/errors.hpp"
#include "spdcwalk/heatmap.hpp"
#include "spdcwalk/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <regex>
#include <sstream>

using namespace spdcwalk;

namespace {

struct Cell {
    std::string fill;
    double value;
};

// (n_s, n_i) -> cell, read back from the SVG attributes.
std::map<std::pair<int, int>, Cell> cells_of(const std::string& svg) {
    static const std::regex re(R"re(fill="(#[0-9a-f]{6})" data-ns="(-?\d+)" data-ni="(-?\d+)" data-value="([^"]+)")re");
    std::map<std::pair<int, int>, Cell> out;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
        out[{std::stoi((*it)[2]), std::stoi((*it)[3])}] = {(*it)[1], io::parse_double((*it)[4].str())};
    }
    return out;
}

std::string root_attribute(const std::string& svg, const std::string& name) {
    const std::regex re("<svg [^>]*" + name + "=\"([^\"]+)\"");
    std::smatch m;
    REQUIRE(std::regex_search(svg, m, re));
    return m[1];
}

CorrelationMatrix random_matrix(std::uint64_t seed, GuideWindow w) {
    auto gen = test::rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    CorrelationMatrix m{w, RealMatrix(w.size(), w.size())};
    for (int r = 0; r < static_cast<int>(w.size()); ++r)
        for (int c = 0; c < static_cast<int>(w.size()); ++c) m.values(r, c) = std::pow(dist(gen), 7.0) * std::exp(-40.0 * dist(gen));
    return m;
}

}  // namespace

TEST_CASE("format_double: scientific, 17 significant digits") {
    CHECK(io::format_double(1.0) == "1.0000000000000000e+00");
    CHECK(io::format_double(0.1) == "1.0000000000000001e-01");
    CHECK(io::format_double(-2.5e-300) == "-2.5000000000000000e-300");
    CHECK(io::format_double(0.0) == "0.0000000000000000e+00");
    CHECK(io::parse_double("1.0000000000000001e-01") == 0.1);
    CHECK_THROWS_AS(io::parse_double("1.0x"), IoError);
    CHECK_THROWS_AS(io::parse_double(""), IoError);
}

TEST_CASE("matrix files re-parse to identical doubles") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const GuideWindow w{-static_cast<int>(seed % 7), static_cast<int>(seed % 5) + 1};
        const CorrelationMatrix m = random_matrix(seed, w);
        std::stringstream buf;
        io::write_matrix(buf, m);
        const CorrelationMatrix back = io::read_matrix(buf);
        CHECK(back.window == m.window);
        CHECK((back.values.array() == m.values.array()).all());
    }
}

TEST_CASE("matrix file layout") {
    CorrelationMatrix m{{-1, 0}, RealMatrix(2, 2)};
    m.values << 1.0, 0.5, 0.25, 0.0;
    std::stringstream buf;
    io::write_matrix(buf, m);
    CHECK(buf.str() ==
          "n_s\\n_i -1 0\n"
          "-1 1.0000000000000000e+00 5.0000000000000000e-01\n"
          "0 2.5000000000000000e-01 0.0000000000000000e+00\n");
}

TEST_CASE("malformed matrix files are rejected") {
    const char* bad[] = {
        "",
        "rows -1 0\n-1 1 2\n0 3 4\n",
        "n_s\\n_i -1 1\n-1 1 2\n1 3 4\n",
        "n_s\\n_i -1 0\n-1 1 2\n",
        "n_s\\n_i -1 0\n-1 1 2\n0 3\n",
        "n_s\\n_i -1 0\n-1 1 2\n1 3 4\n",
        "n_s\\n_i -1 0\n-1 1 two\n0 3 4\n",
    };
    for (const char* text : bad) {
        std::stringstream buf(text);
        CHECK_THROWS_AS(io::read_matrix(buf), IoError);
    }
    CHECK_THROWS_AS(io::read_matrix_file("/nonexistent/spdcwalk/matrix.txt"), IoError);
}

TEST_CASE("tables round-trip, including NaN") {
    io::Table t{{"a", "b"}, {{1.0, std::numeric_limits<double>::quiet_NaN()}, {-0.3, 1e300}}};
    std::stringstream buf;
    io::write_table(buf, t);
    const io::Table back = io::read_table(buf);
    CHECK(back.columns == t.columns);
    REQUIRE(back.rows.size() == 2);
    CHECK(back.rows[0][0] == 1.0);
    CHECK(std::isnan(back.rows[0][1]));
    CHECK(back.rows[1][0] == -0.3);
    CHECK(back.rows[1][1] == 1e300);
    CHECK(back.column("a") == std::vector<double>{1.0, -0.3});
    CHECK_THROWS_AS(back.column("c"), IoError);

    std::stringstream ragged("a b\n1 2\n3\n");
    CHECK_THROWS_AS(io::read_table(ragged), IoError);
}

TEST_CASE("write_file creates directories and reports failures") {
    test::ScratchDir dir("io");
    const auto path = dir.path() / "a" / "b" / "c.txt";
    io::write_file(path, "hello\n");
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "hello");

    // A regular file cannot act as a directory.
    CHECK_THROWS_AS(io::write_file(path / "d.txt", "x"), IoError);
}

TEST_CASE("heatmap: 1x1 matrix is a single full-intensity cell") {
    CorrelationMatrix m{GuideWindow::centered(0), RealMatrix::Constant(1, 1, 1.0)};
    const std::string svg = heatmap_svg(m);
    const auto cells = cells_of(svg);
    REQUIRE(cells.size() == 1);
    CHECK(cells.at({0, 0}).fill == heatmap_color(1.0));
    CHECK(cells.at({0, 0}).value == 1.0);
    CHECK(root_attribute(svg, "data-max") == "1.0000000000000000e+00");
}

TEST_CASE("heatmap: zero matrix is a uniform minimum-color field with max 0") {
    CorrelationMatrix m{GuideWindow::centered(2), RealMatrix::Zero(5, 5)};
    const std::string svg = heatmap_svg(m);
    const auto cells = cells_of(svg);
    CHECK(cells.size() == 25);
    for (const auto& [key, cell] : cells) CHECK(cell.fill == heatmap_color(0.0));
    CHECK(io::parse_double(root_attribute(svg, "data-max")) == 0.0);
}

TEST_CASE("heatmap: labels, color bar and linear scale") {
    const CorrelationMatrix m = random_matrix(7, {-3, 2});
    const std::string svg = heatmap_svg(m, "title & <more>");
    CHECK(svg.find(">n_s</text>") != std::string::npos);
    CHECK(svg.find(">n_i</text>") != std::string::npos);
    CHECK(svg.find("class=\"colorbar\"") != std::string::npos);
    CHECK(svg.find("title &amp; &lt;more&gt;") != std::string::npos);
    const double vmax = m.values.maxCoeff();
    CHECK(io::parse_double(root_attribute(svg, "data-max")) == vmax);
    const auto cells = cells_of(svg);
    CHECK(cells.size() == 36);
    for (const auto& [key, cell] : cells) {
        CHECK(cell.value == m.at(key.first, key.second));
        CHECK(cell.fill == heatmap_color(cell.value / vmax));
    }
}

TEST_CASE("heatmap_color endpoints and clamping") {
    CHECK(heatmap_color(0.0) == heatmap_color(-1.0));
    CHECK(heatmap_color(1.0) == heatmap_color(2.0));
    CHECK(heatmap_color(std::numeric_limits<double>::quiet_NaN()) == heatmap_color(0.0));
    CHECK(heatmap_color(0.0) != heatmap_color(1.0));
}

TEST_CASE("render_heatmap: unwritable path and empty matrix") {
    test::ScratchDir dir("heatmap");
    CorrelationMatrix m{GuideWindow::centered(0), RealMatrix::Constant(1, 1, 2.0)};
    render_heatmap(m, dir.path() / "ok.svg");
    CHECK(std::filesystem::exists(dir.path() / "ok.svg"));
    CHECK_THROWS_AS(render_heatmap(m, dir.path() / "ok.svg" / "no.svg"), IoError);

    CorrelationMatrix empty{GuideWindow::centered(0), RealMatrix(0, 0)};
    CHECK_THROWS_AS(heatmap_svg(empty), InvalidInputError);
}
