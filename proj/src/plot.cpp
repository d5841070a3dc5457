#include "jiofilt/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "jiofilt/types.hpp"

namespace jio {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 150;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 55;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

}  // namespace

void write_line_plot_svg(const std::string& path, const std::string& title,
                         const std::string& x_label, const std::string& y_label,
                         const std::vector<PlotSeries>& series, bool log_y) {
  std::ofstream os(path);
  if (!os) throw IoError("plot: cannot open " + path);

  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  double y_min = x_min;
  double y_max = -x_min;
  double min_positive = std::numeric_limits<double>::infinity();
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (s.y[i] > 0.0) min_positive = std::min(min_positive, s.y[i]);
    }
  }
  if (!std::isfinite(min_positive)) min_positive = 1e-12;
  auto transform_y = [&](double y) {
    if (!log_y) return y;
    return std::log10(std::max(y, min_positive));
  };
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      const double ty = transform_y(s.y[i]);
      y_min = std::min(y_min, ty);
      y_max = std::max(y_max, ty);
    }
  }
  if (!std::isfinite(x_min)) {
    x_min = 0;
    x_max = 1;
    y_min = 0;
    y_max = 1;
  }
  if (x_max == x_min) x_max = x_min + 1;
  if (y_max == y_min) y_max = y_min + 1;
  const double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto px = [&](double x) { return kMarginLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) {
    const double t = transform_y(y);
    return kMarginTop + (1.0 - (t - y_min) / (y_max - y_min)) * plot_h;
  };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\" "
     << "font-family=\"sans-serif\">" << title << "</text>\n";

  // Frame and ticks.
  os << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << plot_w
     << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
  const int n_ticks = 6;
  for (int t = 0; t <= n_ticks; ++t) {
    const double fx = x_min + (x_max - x_min) * t / n_ticks;
    const double gx = px(fx);
    os << "<line x1=\"" << gx << "\" y1=\"" << kMarginTop + plot_h << "\" x2=\"" << gx
       << "\" y2=\"" << kMarginTop + plot_h + 5 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << gx << "\" y=\"" << kMarginTop + plot_h + 20
       << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(fx)
       << "</text>\n";
    const double raw = y_min + (y_max - y_min) * t / n_ticks;
    const double gy = kMarginTop + (1.0 - static_cast<double>(t) / n_ticks) * plot_h;
    os << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << gy << "\" x2=\"" << kMarginLeft
       << "\" y2=\"" << gy << "\" stroke=\"black\"/>\n";
    const std::string label = log_y ? ("1e" + fmt(raw)) : fmt(raw);
    os << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << gy + 4
       << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << label
       << "</text>\n";
  }
  os << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
     << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << x_label
     << "</text>\n";
  os << "<text x=\"18\" y=\"" << kMarginTop + plot_h / 2
     << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
     << "transform=\"rotate(-90 18 " << kMarginTop + plot_h / 2 << ")\">" << y_label
     << "</text>\n";

  int color = 0;
  for (const auto& s : series) {
    const char* stroke = kPalette[color % 8];
    std::ostringstream points;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      points << px(s.x[i]) << "," << py(s.y[i]) << " ";
    }
    os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\""
       << points.str() << "\"/>\n";
    const double ly = kMarginTop + 18 + 18 * color;
    os << "<line x1=\"" << kWidth - kMarginRight + 10 << "\" y1=\"" << ly << "\" x2=\""
       << kWidth - kMarginRight + 34 << "\" y2=\"" << ly << "\" stroke=\"" << stroke
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kWidth - kMarginRight + 40 << "\" y=\"" << ly + 4
       << "\" font-size=\"11\" font-family=\"sans-serif\">" << s.label << "</text>\n";
    ++color;
  }
  os << "</svg>\n";
  if (!os.good()) throw IoError("plot: write failed for " + path);
}

}  // namespace jio
