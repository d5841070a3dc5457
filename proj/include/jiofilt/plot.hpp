#ifndef JIOFILT_PLOT_HPP
#define JIOFILT_PLOT_HPP

#include <string>
#include <vector>

namespace jio {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Static SVG line chart; the figure artifact written next to each CSV.
/// log_y plots log10 of the values (used for BER curves); nonpositive values
/// are clamped to the smallest positive point.
void write_line_plot_svg(const std::string& path, const std::string& title,
                         const std::string& x_label, const std::string& y_label,
                         const std::vector<PlotSeries>& series, bool log_y = false);

}  // namespace jio

#endif  // JIOFILT_PLOT_HPP
