#pragma once
// Plain-text matrix and table files.
//
// Matrix files: a header line "n_s\n_i <lo> ... <hi>" followed by one row per n_s, each
// starting with the row index. Values use 17 significant digits in scientific notation, so
// reading a file back reproduces the doubles exactly.

#include "spdcwalk/biphoton.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace spdcwalk::io {

std::string format_double(double value);
double parse_double(std::string_view text);

void write_matrix(std::ostream& out, const CorrelationMatrix& matrix);
CorrelationMatrix read_matrix(std::istream& in);
CorrelationMatrix read_matrix_file(const std::filesystem::path& path);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::vector<double> column(std::string_view name) const;
};

void write_table(std::ostream& out, const Table& table);
Table read_table(std::istream& in);
Table read_table_file(const std::filesystem::path& path);

Table sweep_table(const PhaseSweepSeries& series);

// Writes `contents` to `path`, creating parent directories; throws IoError.
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace spdcwalk::io
