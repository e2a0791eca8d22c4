#include "sparseva/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace sparseva {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 160, kTop = 40, kBottom = 50;

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void include(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double log_v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "1e%g", log_v);
    return buf;
}

}  // namespace

void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<PlotSeries>& series) {
    Range rx, ry;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i)
            if (s.x[i] > 0.0 && s.y[i] > 0.0) {
                rx.include(std::log10(s.x[i]));
                ry.include(std::log10(s.y[i]));
            }
    if (!(rx.lo <= rx.hi)) {
        rx = {0.0, 1.0};
        ry = {0.0, 1.0};
    }
    if (rx.hi - rx.lo < 1e-9) rx.hi = rx.lo + 1.0;
    if (ry.hi - ry.lo < 1e-9) ry.hi = ry.lo + 1.0;
    const double pad_y = 0.05 * (ry.hi - ry.lo);
    ry.lo -= pad_y;
    ry.hi += pad_y;

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double lx) { return kLeft + (lx - rx.lo) / (rx.hi - rx.lo) * pw; };
    auto py = [&](double ly) { return kTop + (ry.hi - ly) / (ry.hi - ry.lo) * ph; };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write figure: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kLeft + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";

    // frame
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    // decade ticks
    for (double d = std::ceil(rx.lo); d <= std::floor(rx.hi) + 1e-9; d += 1.0) {
        const double x = px(d);
        out << "<line x1=\"" << num(x) << "\" y1=\"" << kTop << "\" x2=\"" << num(x) << "\" y2=\""
            << kTop + ph << "\" stroke=\"#dddddd\"/>\n"
            << "<text x=\"" << num(x) << "\" y=\"" << kTop + ph + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << tick_label(d) << "</text>\n";
    }
    for (double d = std::ceil(ry.lo); d <= std::floor(ry.hi) + 1e-9; d += 1.0) {
        const double y = py(d);
        out << "<line x1=\"" << kLeft << "\" y1=\"" << num(y) << "\" x2=\"" << kLeft + pw
            << "\" y2=\"" << num(y) << "\" stroke=\"#dddddd\"/>\n"
            << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(y + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << tick_label(d) << "</text>\n";
    }

    out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
        << "</text>\n"
        << "<text x=\"16\" y=\"" << kTop + ph / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 16 " << kTop + ph / 2 << ")\">" << y_label << "</text>\n";

    double legend_y = kTop + 10;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!(s.x[i] > 0.0 && s.y[i] > 0.0)) continue;
            out << num(px(std::log10(s.x[i]))) << ',' << num(py(std::log10(s.y[i]))) << ' ';
        }
        out << "\"/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!(s.x[i] > 0.0 && s.y[i] > 0.0)) continue;
            out << "<circle cx=\"" << num(px(std::log10(s.x[i]))) << "\" cy=\""
                << num(py(std::log10(s.y[i]))) << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
        }
        const double lx = kLeft + pw + 12;
        out << "<line x1=\"" << lx << "\" y1=\"" << legend_y << "\" x2=\"" << lx + 20 << "\" y2=\""
            << legend_y << "\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"/>\n"
            << "<text x=\"" << lx + 26 << "\" y=\"" << legend_y + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
        legend_y += 18;
    }
    out << "</svg>\n";
}

}  // namespace sparseva
