// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace mvanc {

// Small static SVG line charts. Plots are views over already-exported CSV
// data; nothing downstream reads them back.
struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    int width = 920;
    int height = 520;
    // polylines longer than this are decimated for file size
    int max_points_per_series = 4000;
};

void write_svg_line_chart(const std::string& path, const std::vector<PlotSeries>& series,
                          const PlotOptions& options);

} // namespace mvanc
