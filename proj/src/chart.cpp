#include "dlsim/chart.hpp"

#include "dlsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

namespace dlsim {

namespace {

const char* kPalette[] = {
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
    "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#1f77b4", "#2ca02c",
};
constexpr int kPaletteSize = 12;
// Mint shade marking the single-technique min/max band.
const char* kBandColor = "#1ea5a5";

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c; break;
        }
    }
    return out;
}

} // namespace

void write_svg(std::ostream& os, const BarChart& chart) {
    const std::size_t groups = chart.groups.size();
    const std::size_t series = chart.series.size();
    if (groups == 0 || series == 0) throw ConfigError("chart: needs groups and series");
    if (chart.values.size() != groups) throw ConfigError("chart: values/groups mismatch");

    double vmin = std::numeric_limits<double>::infinity();
    double vmax = 0.0;
    for (const auto& row : chart.values) {
        for (double v : row) {
            if (std::isnan(v) || v <= 0.0) continue;
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    }
    if (!(vmax > 0.0)) {
        vmin = 1.0;
        vmax = 1.0;
    }
    const bool log_y = chart.log_y || (vmin > 0.0 && vmax / vmin > 50.0);
    const double lo = log_y ? std::pow(10.0, std::floor(std::log10(vmin))) : 0.0;
    const double hi = log_y ? std::pow(10.0, std::ceil(std::log10(vmax))) : vmax * 1.08;

    const double bar_w = 9.0;
    const double group_gap = 14.0;
    const double group_w = static_cast<double>(series) * bar_w + group_gap;
    const double ml = 70.0, mr = 20.0, mt = 58.0, mb = 58.0;
    const double plot_w = group_w * static_cast<double>(groups);
    const double plot_h = 300.0;
    const double width = ml + plot_w + mr;
    const double height = mt + plot_h + mb;

    auto y_of = [&](double v) {
        double frac = 0.0;
        if (log_y) {
            frac = (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo));
        } else {
            frac = (v - lo) / (hi - lo);
        }
        frac = std::clamp(frac, 0.0, 1.0);
        return mt + plot_h * (1.0 - frac);
    };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
       << fmt(height) << "\" font-family=\"sans-serif\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << fmt(ml) << "\" y=\"20\" font-size=\"15\">" << escape(chart.title)
       << "</text>\n";

    // legend
    double lx = ml;
    for (std::size_t s = 0; s < series; ++s) {
        os << "<rect x=\"" << fmt(lx) << "\" y=\"28\" width=\"10\" height=\"10\" fill=\""
           << kPalette[s % kPaletteSize] << "\"/>\n";
        os << "<text x=\"" << fmt(lx + 13) << "\" y=\"37\" font-size=\"10\">"
           << escape(chart.series[s]) << "</text>\n";
        lx += 14.0 + 7.0 * static_cast<double>(chart.series[s].size()) + 12.0;
    }

    // y axis and ticks
    os << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(ml)
       << "\" y2=\"" << fmt(mt + plot_h) << "\" stroke=\"black\"/>\n";
    if (log_y) {
        for (double v = lo; v <= hi * 1.0001; v *= 10.0) {
            const double y = y_of(v);
            os << "<line x1=\"" << fmt(ml - 4) << "\" y1=\"" << fmt(y) << "\" x2=\""
               << fmt(ml + plot_w) << "\" y2=\"" << fmt(y)
               << "\" stroke=\"#dddddd\" stroke-width=\"0.7\"/>\n";
            os << "<text x=\"" << fmt(ml - 8) << "\" y=\"" << fmt(y + 3)
               << "\" font-size=\"9\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
        }
    } else {
        for (int i = 0; i <= 5; ++i) {
            const double v = lo + (hi - lo) * static_cast<double>(i) / 5.0;
            const double y = y_of(v);
            os << "<line x1=\"" << fmt(ml - 4) << "\" y1=\"" << fmt(y) << "\" x2=\""
               << fmt(ml + plot_w) << "\" y2=\"" << fmt(y)
               << "\" stroke=\"#dddddd\" stroke-width=\"0.7\"/>\n";
            os << "<text x=\"" << fmt(ml - 8) << "\" y=\"" << fmt(y + 3)
               << "\" font-size=\"9\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
        }
    }
    os << "<text x=\"14\" y=\"" << fmt(mt + plot_h / 2)
       << "\" font-size=\"11\" transform=\"rotate(-90 14 " << fmt(mt + plot_h / 2) << ")\">"
       << escape(chart.y_label) << "</text>\n";

    // bands behind the bars
    for (std::size_t g = 0; g < groups; ++g) {
        if (g >= chart.bands.size() || !chart.bands[g]) continue;
        const double x0 = ml + group_w * static_cast<double>(g) + group_gap / 2.0;
        const double y_hi = y_of(chart.bands[g]->hi);
        const double y_lo = y_of(chart.bands[g]->lo);
        os << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y_hi) << "\" width=\""
           << fmt(static_cast<double>(series) * bar_w) << "\" height=\"" << fmt(y_lo - y_hi)
           << "\" fill=\"" << kBandColor << "\" fill-opacity=\"0.22\"/>\n";
    }

    // bars and group labels
    for (std::size_t g = 0; g < groups; ++g) {
        const double x0 = ml + group_w * static_cast<double>(g) + group_gap / 2.0;
        for (std::size_t s = 0; s < series && s < chart.values[g].size(); ++s) {
            const double v = chart.values[g][s];
            if (std::isnan(v) || v <= 0.0) continue;
            const double y = y_of(v);
            os << "<rect x=\"" << fmt(x0 + bar_w * static_cast<double>(s)) << "\" y=\""
               << fmt(y) << "\" width=\"" << fmt(bar_w - 1.5) << "\" height=\""
               << fmt(mt + plot_h - y) << "\" fill=\"" << kPalette[s % kPaletteSize]
               << "\"/>\n";
        }
        const double cx = x0 + static_cast<double>(series) * bar_w / 2.0;
        os << "<text x=\"" << fmt(cx) << "\" y=\"" << fmt(mt + plot_h + 14)
           << "\" font-size=\"9\" text-anchor=\"end\" transform=\"rotate(-45 " << fmt(cx) << " "
           << fmt(mt + plot_h + 14) << ")\">" << escape(chart.groups[g]) << "</text>\n";
    }

    os << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(mt + plot_h) << "\" x2=\""
       << fmt(ml + plot_w) << "\" y2=\"" << fmt(mt + plot_h) << "\" stroke=\"black\"/>\n";
    os << "</svg>\n";
}

void save_svg(const std::string& path, const BarChart& chart) {
    std::ofstream os(path);
    if (!os) throw ConfigError("chart: cannot open '" + path + "' for writing");
    write_svg(os, chart);
}

} // namespace dlsim
