#include "ivi/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "ivi/errors.hpp"

namespace ivi::svg {

namespace {

constexpr int kW = 640;
constexpr int kH = 420;
constexpr int kPad = 52;

struct Scale {
  double xmin, xmax, ymin, ymax;
  double sx(double x) const {
    return kPad + (x - xmin) / (xmax - xmin) * (kW - 2 * kPad);
  }
  double sy(double y) const {
    return kH - kPad - (y - ymin) / (ymax - ymin) * (kH - 2 * kPad);
  }
};

std::ofstream open_out(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw NumericError("svg: cannot open " + path.string());
  return out;
}

void header(std::ofstream& out, const std::string& title) {
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW
      << "' height='" << kH << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n"
      << "<text x='" << kW / 2 << "' y='20' text-anchor='middle' "
      << "font-family='sans-serif' font-size='14'>" << title << "</text>\n";
}

}  // namespace

void line_plot(const std::filesystem::path& path,
               const std::vector<Series>& series, const std::string& title,
               bool log_y, const Band* band) {
  auto out = open_out(path);
  Scale sc{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest(),
           std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest()};
  auto fold = [&](double x, double y) {
    sc.xmin = std::min(sc.xmin, x);
    sc.xmax = std::max(sc.xmax, x);
    sc.ymin = std::min(sc.ymin, y);
    sc.ymax = std::max(sc.ymax, y);
  };
  auto ty = [&](double y) { return log_y ? std::log10(std::max(y, 1e-300)) : y; };
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) fold(s.x[i], ty(s.y[i]));
  if (band)
    for (size_t i = 0; i < band->x.size(); ++i) {
      fold(band->x[i], ty(band->lower[i]));
      fold(band->x[i], ty(band->upper[i]));
    }
  if (sc.xmax <= sc.xmin) sc.xmax = sc.xmin + 1;
  if (sc.ymax <= sc.ymin) sc.ymax = sc.ymin + 1;

  header(out, title);
  // axes
  out << "<line x1='" << kPad << "' y1='" << kH - kPad << "' x2='" << kW - kPad
      << "' y2='" << kH - kPad << "' stroke='black'/>\n"
      << "<line x1='" << kPad << "' y1='" << kPad << "' x2='" << kPad
      << "' y2='" << kH - kPad << "' stroke='black'/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = sc.xmin + (sc.xmax - sc.xmin) * i / 4;
    const double fy = sc.ymin + (sc.ymax - sc.ymin) * i / 4;
    out << "<text x='" << sc.sx(fx) << "' y='" << kH - kPad + 16
        << "' text-anchor='middle' font-size='10' font-family='sans-serif'>"
        << fx << "</text>\n"
        << "<text x='" << kPad - 6 << "' y='" << sc.sy(fy) + 3
        << "' text-anchor='end' font-size='10' font-family='sans-serif'>"
        << (log_y ? "1e" + std::to_string(static_cast<int>(std::round(fy))) : std::to_string(fy).substr(0, 8))
        << "</text>\n";
  }
  if (band && !band->x.empty()) {
    out << "<polygon fill='" << band->color << "' fill-opacity='0.25' stroke='none' points='";
    for (size_t i = 0; i < band->x.size(); ++i)
      out << sc.sx(band->x[i]) << "," << sc.sy(ty(band->upper[i])) << " ";
    for (size_t i = band->x.size(); i-- > 0;)
      out << sc.sx(band->x[i]) << "," << sc.sy(ty(band->lower[i])) << " ";
    out << "'/>\n";
  }
  int li = 0;
  for (const auto& s : series) {
    out << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.4' points='";
    for (size_t i = 0; i < s.x.size(); ++i)
      out << sc.sx(s.x[i]) << "," << sc.sy(ty(s.y[i])) << " ";
    out << "'/>\n";
    if (!s.label.empty()) {
      out << "<text x='" << kW - kPad - 4 << "' y='" << kPad + 14 * li
          << "' text-anchor='end' font-size='11' font-family='sans-serif' fill='"
          << s.color << "'>" << s.label << "</text>\n";
      ++li;
    }
  }
  out << "</svg>\n";
}

void heatmap(const std::filesystem::path& path, const Eigen::MatrixXd& m,
             const std::string& title) {
  auto out = open_out(path);
  header(out, title);
  const double vmax = std::max(std::abs(m.maxCoeff()), std::abs(m.minCoeff()));
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  const double cw = static_cast<double>(kW - 2 * kPad) / cols;
  const double ch = static_cast<double>(kH - 2 * kPad) / rows;
  // Downsample very large matrices so files stay small.
  const int step = std::max(1, rows / 200);
  for (int r = 0; r < rows; r += step)
    for (int c = 0; c < cols; c += step) {
      const double v = vmax > 0 ? m(r, c) / vmax : 0.0;
      const int red = v > 0 ? static_cast<int>(255 * v) : 0;
      const int blue = v < 0 ? static_cast<int>(-255 * v) : 0;
      out << "<rect x='" << kPad + c * cw << "' y='" << kPad + r * ch
          << "' width='" << cw * step + 0.5 << "' height='" << ch * step + 0.5
          << "' fill='rgb(" << 255 - blue << "," << 255 - red - blue << ","
          << 255 - red << ")'/>\n";
    }
  out << "</svg>\n";
}

}  // namespace ivi::svg
