#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "soris/types.hpp"

namespace soris {

// Header line followed by one row per record; cells are written verbatim.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  // Index of a named column; throws ConfigError if absent.
  std::size_t column(const std::string& name) const;
};

// Shortest text that parses back to the same double.
std::string format_double(double v);

void write_table(const std::filesystem::path& path, const Table& table);
Table read_table(const std::filesystem::path& path);

// Headerless numeric matrix, one line per row.
void write_matrix_csv(const std::filesystem::path& path, const RealMatrix& m);
RealMatrix read_matrix_csv(const std::filesystem::path& path);

// One complex vector per line as interleaved real, imag pairs.
void write_complex_rows(const std::filesystem::path& path,
                        const std::vector<ComplexVector>& rows);
std::vector<ComplexVector> read_complex_rows(const std::filesystem::path& path);

}  // namespace soris
