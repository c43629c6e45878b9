#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

namespace ivi::svg {

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  std::string label;
};

// Optional shaded band drawn behind the series (e.g. credibility region).
struct Band {
  std::vector<double> x;
  std::vector<double> lower;
  std::vector<double> upper;
  std::string color = "#2ca02c";
};

void line_plot(const std::filesystem::path& path,
               const std::vector<Series>& series, const std::string& title,
               bool log_y = false, const Band* band = nullptr);

void heatmap(const std::filesystem::path& path, const Eigen::MatrixXd& m,
             const std::string& title);

}  // namespace ivi::svg
