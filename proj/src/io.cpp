#include "spdcwalk/io.hpp"

#include "spdcwalk/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace spdcwalk::io {

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::scientific, 16);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw IoError("cannot parse number '" + std::string(text) + "'");
    }
    return value;
}

namespace {

std::vector<std::string> split_words(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> words;
    std::string w;
    while (in >> w) words.push_back(w);
    return words;
}

int parse_int(const std::string& text) {
    int value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw IoError("cannot parse guide index '" + text + "'");
    }
    return value;
}

constexpr const char* kMatrixCorner = "n_s\\n_i";

}  // namespace

void write_matrix(std::ostream& out, const CorrelationMatrix& matrix) {
    const GuideWindow& w = matrix.window;
    out << kMatrixCorner;
    for (int i = w.lo; i <= w.hi; ++i) out << ' ' << i;
    out << '\n';
    for (int s = w.lo; s <= w.hi; ++s) {
        out << s;
        for (int i = w.lo; i <= w.hi; ++i) out << ' ' << format_double(matrix.at(s, i));
        out << '\n';
    }
}

CorrelationMatrix read_matrix(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("matrix file: missing header");
    const auto header = split_words(line);
    if (header.size() < 2 || header[0] != kMatrixCorner) throw IoError("matrix file: malformed header");

    const int lo = parse_int(header[1]);
    const int hi = lo + static_cast<int>(header.size()) - 2;
    for (std::size_t k = 1; k < header.size(); ++k) {
        if (parse_int(header[k]) != lo + static_cast<int>(k) - 1) throw IoError("matrix file: non-contiguous header");
    }
    CorrelationMatrix m{{lo, hi}, RealMatrix(hi - lo + 1, hi - lo + 1)};
    for (int s = lo; s <= hi; ++s) {
        if (!std::getline(in, line)) throw IoError("matrix file: missing row " + std::to_string(s));
        const auto words = split_words(line);
        if (words.size() != header.size() || parse_int(words[0]) != s) {
            throw IoError("matrix file: malformed row " + std::to_string(s));
        }
        for (int i = lo; i <= hi; ++i) {
            m.values(m.window.offset(s), m.window.offset(i)) = parse_double(words[static_cast<std::size_t>(i - lo + 1)]);
        }
    }
    return m;
}

CorrelationMatrix read_matrix_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_matrix(in);
}

std::vector<double> Table::column(std::string_view name) const {
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c] == name) {
            std::vector<double> out;
            for (const auto& r : rows) out.push_back(r[c]);
            return out;
        }
    }
    throw IoError("table has no column '" + std::string(name) + "'");
}

void write_table(std::ostream& out, const Table& table) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? " " : "") << table.columns[c];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? " " : "") << format_double(row[c]);
        out << '\n';
    }
}

Table read_table(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("table file: missing header");
    Table t{split_words(line), {}};
    while (std::getline(in, line)) {
        const auto words = split_words(line);
        if (words.empty()) continue;
        if (words.size() != t.columns.size()) throw IoError("table file: ragged row");
        std::vector<double> row;
        for (const auto& w : words) row.push_back(parse_double(w));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table read_table_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_table(in);
}

Table sweep_table(const PhaseSweepSeries& series) {
    const std::string probe = "gamma_" + std::to_string(series.probe_signal) + "_" + std::to_string(series.probe_idler);
    Table t{{"phase_rad", probe, "total"}, {}};
    for (const auto& s : series.samples) t.rows.push_back({s.phase, s.cross, s.total});
    return t;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw IoError("write to " + path.string() + " failed");
}

}  // namespace spdcwalk::io
