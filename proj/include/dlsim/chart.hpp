#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dlsim {

// Grouped bar chart rendered as a standalone SVG: one group per x label, one
// bar per series, with an optional shaded band per group behind the bars.
struct BarChart {
    std::string title;
    std::string y_label;
    std::vector<std::string> groups;
    std::vector<std::string> series;
    // values[group][series]; NaN draws no bar.
    std::vector<std::vector<double>> values;
    struct Band {
        double lo = 0.0;
        double hi = 0.0;
    };
    std::vector<std::optional<Band>> bands; // per group, optional
    bool log_y = false;
};

void write_svg(std::ostream& os, const BarChart& chart);
void save_svg(const std::string& path, const BarChart& chart);

} // namespace dlsim
