#pragma once

#include <string>
#include <vector>

namespace sparseva {

struct PlotSeries {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

/// Writes a self-contained SVG line plot with both axes on a log10 scale.
/// Non-positive values are skipped.
void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<PlotSeries>& series);

}  // namespace sparseva
