#include "ivi/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ivi/errors.hpp"

namespace ivi::csv {

std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {
std::ofstream open_out(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw NumericError("csv: cannot open " + path.string());
  return out;
}
}  // namespace

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                  const std::vector<std::string>& header) {
  auto out = open_out(path);
  if (!header.empty()) {
    for (size_t i = 0; i < header.size(); ++i)
      out << header[i] << (i + 1 < header.size() ? "," : "\n");
  }
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c)
      out << format(m(r, c)) << (c + 1 < m.cols() ? "," : "\n");
  }
}

void write_vector(const std::filesystem::path& path, const Eigen::VectorXd& v,
                  const std::string& header) {
  auto out = open_out(path);
  if (!header.empty()) out << header << "\n";
  for (int i = 0; i < v.size(); ++i) out << format(v[i]) << "\n";
}

void write_rows(const std::filesystem::path& path,
                const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows) {
  auto out = open_out(path);
  for (size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "\n");
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size(); ++c)
      out << format(row[c]) << (c + 1 < row.size() ? "," : "\n");
  }
}

void write_table(const std::filesystem::path& path,
                 const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  auto out = open_out(path);
  for (size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "\n");
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size(); ++c)
      out << row[c] << (c + 1 < row.size() ? "," : "\n");
  }
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path,
                            bool skip_header) {
  std::ifstream in(path);
  if (!in) throw ValidationError("csv: cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first && skip_header) {
      first = false;
      continue;
    }
    first = false;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return {};
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  return m;
}

}  // namespace ivi::csv
