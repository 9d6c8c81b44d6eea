#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "crn/analysis.hpp"
#include "crn/numfmt.hpp"

namespace crn {

namespace detail {

struct Axis {
    double lo, hi;
    double map(double v, double px_lo, double px_hi) const {
        double t = (v - lo) / (hi - lo);
        return px_lo + t * (px_hi - px_lo);
    }
};

inline void svg_panel(std::ostream& os, std::span<const BodePoint> pts, bool gain_panel,
                      double top, double height, const std::string& color,
                      const std::string& ylabel) {
    const double left = 70.0, right = 760.0;
    Axis x{std::log10(pts.front().omega), std::log10(pts.back().omega)};
    if (x.hi == x.lo) x.hi = x.lo + 1.0;
    double ymin = 1e300, ymax = -1e300;
    for (const auto& p : pts) {
        double v = gain_panel ? p.gain_db : p.phase;
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
    }
    if (ymax - ymin < 1e-9) {
        ymin -= 1.0;
        ymax += 1.0;
    }
    double pad = 0.05 * (ymax - ymin);
    Axis y{ymin - pad, ymax + pad};
    const double bottom = top + height;

    os << "<rect x='" << left << "' y='" << top << "' width='" << right - left << "' height='"
       << height << "' fill='white' stroke='black' stroke-width='1'/>\n";

    // decade gridlines and x tick labels
    for (int d = static_cast<int>(std::ceil(x.lo)); d <= static_cast<int>(std::floor(x.hi)); ++d) {
        double px = x.map(d, left, right);
        os << "<line x1='" << px << "' y1='" << top << "' x2='" << px << "' y2='" << bottom
           << "' stroke='#cccccc' stroke-width='0.5'/>\n";
        os << "<text x='" << px << "' y='" << bottom + 16
           << "' font-size='11' text-anchor='middle'>1e" << d << "</text>\n";
    }
    // four horizontal ticks
    for (int i = 0; i <= 3; ++i) {
        double v = y.lo + (y.hi - y.lo) * i / 3.0;
        double py = y.map(v, bottom, top);
        os << "<line x1='" << left - 4 << "' y1='" << py << "' x2='" << left << "' y2='" << py
           << "' stroke='black' stroke-width='1'/>\n";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", v);
        os << "<text x='" << left - 8 << "' y='" << py + 4
           << "' font-size='11' text-anchor='end'>" << buf << "</text>\n";
    }
    os << "<text x='16' y='" << top + height / 2
       << "' font-size='12' text-anchor='middle' transform='rotate(-90 16 " << top + height / 2
       << ")'>" << ylabel << "</text>\n";

    os << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
    for (const auto& p : pts) {
        double v = gain_panel ? p.gain_db : p.phase;
        os << x.map(std::log10(p.omega), left, right) << ',' << y.map(v, bottom, top) << ' ';
    }
    os << "'/>\n";
}

}  // namespace detail

/// Self-contained SVG Bode plot: gain (dB) on top, phase (rad) below, both
/// against log-frequency. No external assets or scripts.
inline void write_bode_svg(std::ostream& os, std::span<const BodePoint> points) {
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='800' height='560' "
          "viewBox='0 0 800 560'>\n";
    os << "<rect width='800' height='560' fill='white'/>\n";
    if (points.size() >= 2) {
        detail::svg_panel(os, points, true, 30.0, 210.0, "#c0392b", "gain (dB)");
        detail::svg_panel(os, points, false, 300.0, 210.0, "#2980b9", "phase (rad)");
        os << "<text x='400' y='550' font-size='12' text-anchor='middle'>omega (rad/s)</text>\n";
    } else {
        os << "<text x='400' y='280' font-size='14' text-anchor='middle'>not enough points"
           << "</text>\n";
    }
    os << "</svg>\n";
}

}  // namespace crn
