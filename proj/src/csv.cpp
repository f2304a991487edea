#include "soris/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "soris/error.hpp"

namespace soris {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& text, const std::filesystem::path& path) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("non-numeric cell '" + text + "' in " + path.string());
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<std::vector<double>> read_numeric(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split_line(line)) row.push_back(parse_double(cell, path));
    if (!rows.empty() && row.size() != rows.front().size())
      throw ConfigError("ragged rows in " + path.string());
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size())
    throw ContractError("row has " + std::to_string(row.size()) + " cells, table has " +
                        std::to_string(columns.size()) + " columns");
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw ConfigError("table has no column '" + name + "'");
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw ContractError("cannot format number");
  return std::string(buf, ptr);
}

void write_table(const std::filesystem::path& path, const Table& table) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + " is empty");
  t.columns = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != t.columns.size())
      throw ConfigError("row width mismatch in " + path.string());
    t.rows.push_back(std::move(cells));
  }
  return t;
}

void write_matrix_csv(const std::filesystem::path& path, const RealMatrix& m) {
  auto out = open_out(path);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_double(m(r, c));
    out << '\n';
  }
}

RealMatrix read_matrix_csv(const std::filesystem::path& path) {
  const auto rows = read_numeric(path);
  if (rows.empty()) return RealMatrix(0, 0);
  RealMatrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  return m;
}

void write_complex_rows(const std::filesystem::path& path,
                        const std::vector<ComplexVector>& rows) {
  auto out = open_out(path);
  for (const auto& v : rows) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
      out << (i ? "," : "") << format_double(v[i].real()) << ',' << format_double(v[i].imag());
    out << '\n';
  }
}

std::vector<ComplexVector> read_complex_rows(const std::filesystem::path& path) {
  const auto rows = read_numeric(path);
  std::vector<ComplexVector> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.size() % 2 != 0) throw ConfigError("odd column count in " + path.string());
    ComplexVector v(row.size() / 2);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = {row[2 * i], row[2 * i + 1]};
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace soris
