// SPDX-License-Identifier: Apache-2.0
#include "core/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "core/errors.hpp"

namespace mvanc {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

struct AxisTicks {
    std::vector<double> values;
};

// "nice" linear ticks covering [lo, hi]
AxisTicks linear_ticks(double lo, double hi, int target = 6) {
    AxisTicks t;
    if (!(hi > lo)) {
        t.values = {lo};
        return t;
    }
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    }
    const double start = std::ceil(lo / step) * step;
    for (double v = start; v <= hi + step * 1e-9; v += step) t.values.push_back(v);
    return t;
}

AxisTicks log_ticks(double lo, double hi) {
    AxisTicks t;
    const int e0 = static_cast<int>(std::floor(std::log10(lo)));
    const int e1 = static_cast<int>(std::ceil(std::log10(hi)));
    for (int e = e0; e <= e1; ++e) t.values.push_back(std::pow(10.0, e));
    return t;
}

std::string fmt(double v) {
    char buf[32];
    if (std::fabs(v) >= 1e5 || (std::fabs(v) < 1e-3 && v != 0.0))
        std::snprintf(buf, sizeof(buf), "%.1e", v);
    else
        std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

} // namespace

void write_svg_line_chart(const std::string& path, const std::vector<PlotSeries>& series,
                          const PlotOptions& opt) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path + "' for writing");

    const double ml = 72, mr = 22, mt = 40, mb = 52;
    const double pw = opt.width - ml - mr;
    const double ph = opt.height - mt - mb;

    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (opt.log_y && s.y[i] <= 0.0) continue;
            x_lo = std::min(x_lo, s.x[i]);
            x_hi = std::max(x_hi, s.x[i]);
            y_lo = std::min(y_lo, s.y[i]);
            y_hi = std::max(y_hi, s.y[i]);
        }
    if (!std::isfinite(x_lo) || !std::isfinite(y_lo)) {
        x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    }
    if (x_hi <= x_lo) x_hi = x_lo + 1;
    if (y_hi <= y_lo) y_hi = y_lo + (opt.log_y ? y_lo : 1.0);
    if (!opt.log_y) {
        const double pad = 0.05 * (y_hi - y_lo);
        y_lo -= pad;
        y_hi += pad;
    }

    auto sx = [&](double x) { return ml + pw * (x - x_lo) / (x_hi - x_lo); };
    auto sy = [&](double y) {
        if (opt.log_y) {
            const double ly = std::log10(y), l0 = std::log10(y_lo), l1 = std::log10(y_hi);
            return mt + ph * (1.0 - (ly - l0) / (l1 - l0));
        }
        return mt + ph * (1.0 - (y - y_lo) / (y_hi - y_lo));
    };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
       << opt.height << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << opt.width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"15\">" << escape_xml(opt.title) << "</text>\n";

    // grid + ticks
    const AxisTicks xt = linear_ticks(x_lo, x_hi);
    const AxisTicks yt = opt.log_y ? log_ticks(y_lo, y_hi) : linear_ticks(y_lo, y_hi);
    os << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (double v : xt.values) {
        const double X = sx(v);
        os << "<line x1=\"" << X << "\" y1=\"" << mt << "\" x2=\"" << X << "\" y2=\"" << mt + ph
           << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << X << "\" y=\"" << mt + ph + 16 << "\" text-anchor=\"middle\">"
           << fmt(v) << "</text>\n";
    }
    for (double v : yt.values) {
        if (v < y_lo || v > y_hi) continue;
        const double Y = sy(v);
        os << "<line x1=\"" << ml << "\" y1=\"" << Y << "\" x2=\"" << ml + pw << "\" y2=\"" << Y
           << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << ml - 6 << "\" y=\"" << Y + 4 << "\" text-anchor=\"end\">" << fmt(v)
           << "</text>\n";
    }
    os << "</g>\n";
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << opt.height - 12
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
       << escape_xml(opt.x_label) << "</text>\n";
    os << "<text x=\"16\" y=\"" << mt + ph / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
          "transform=\"rotate(-90 16 "
       << mt + ph / 2 << ")\">" << escape_xml(opt.y_label) << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
        const std::size_t n = std::min(s.x.size(), s.y.size());
        const std::size_t stride =
            n > static_cast<std::size_t>(opt.max_points_per_series)
                ? n / static_cast<std::size_t>(opt.max_points_per_series)
                : 1;
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.3\" points=\"";
        bool first = true;
        char buf[64];
        for (std::size_t i = 0; i < n; i += stride) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (opt.log_y && s.y[i] <= 0.0) continue;
            std::snprintf(buf, sizeof(buf), "%.1f,%.1f", sx(s.x[i]), sy(s.y[i]));
            if (!first) os << ' ';
            os << buf;
            first = false;
        }
        os << "\"/>\n";
        // legend
        const double lx = ml + pw - 170, ly = mt + 14 + 16 * static_cast<double>(si);
        os << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 22 << "\" y2=\""
           << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << lx + 28 << "\" y=\"" << ly
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape_xml(s.label)
           << "</text>\n";
    }
    os << "</svg>\n";
    if (!os) throw IoError("write failed for '" + path + "'");
}

} // namespace mvanc
