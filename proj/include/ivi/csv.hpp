#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

namespace ivi::csv {

// All writers print doubles with %.17g so artifacts are byte-stable per seed.
std::string format(double v);

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                  const std::vector<std::string>& header = {});
void write_vector(const std::filesystem::path& path, const Eigen::VectorXd& v,
                  const std::string& header = "");
void write_rows(const std::filesystem::path& path,
                const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows);
void write_table(const std::filesystem::path& path,
                 const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);

Eigen::MatrixXd read_matrix(const std::filesystem::path& path,
                            bool skip_header = true);

}  // namespace ivi::csv
