#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "mixedrobust/region.hpp"

namespace mixedrobust {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

constexpr double kWidth = 800.0, kHeight = 600.0;
constexpr double kMarginL = 70.0, kMarginR = 30.0, kMarginT = 40.0, kMarginB = 60.0;

struct Mapper {
    double lo0, hi0, lo1, hi1;
    double sx(double x) const {
        return kMarginL + (x - lo0) / (hi0 - lo0) * (kWidth - kMarginL - kMarginR);
    }
    double sy(double y) const {
        return kHeight - kMarginB - (y - lo1) / (hi1 - lo1) * (kHeight - kMarginT - kMarginB);
    }
};

void svg_header(std::ostream& os) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
          "viewBox=\"0 0 800 600\">\n"
       << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
}

void svg_axes(std::ostream& os, const Mapper& m, const std::string& xlabel,
              const std::string& ylabel) {
    os << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
    os << "<rect x=\"" << num(kMarginL) << "\" y=\"" << num(kMarginT) << "\" width=\""
       << num(kWidth - kMarginL - kMarginR) << "\" height=\"" << num(kHeight - kMarginT - kMarginB)
       << "\"/>\n</g>\n";
    os << "<g font-family=\"sans-serif\" font-size=\"13\" fill=\"black\">\n";
    for (int k = 0; k <= 5; ++k) {
        double fx = m.lo0 + (m.hi0 - m.lo0) * k / 5.0;
        double fy = m.lo1 + (m.hi1 - m.lo1) * k / 5.0;
        os << "<text x=\"" << num(m.sx(fx) - 10) << "\" y=\"" << num(kHeight - kMarginB + 18)
           << "\">" << num(fx) << "</text>\n";
        os << "<text x=\"" << num(kMarginL - 45) << "\" y=\"" << num(m.sy(fy) + 4) << "\">"
           << num(fy) << "</text>\n";
    }
    os << "<text x=\"" << num(kWidth / 2 - 20) << "\" y=\"" << num(kHeight - 15) << "\">" << xlabel
       << "</text>\n";
    os << "<text x=\"15\" y=\"" << num(kHeight / 2) << "\" transform=\"rotate(-90 15 "
       << num(kHeight / 2) << ")\">" << ylabel << "</text>\n";
    os << "</g>\n";
}

void svg_polygons(std::ostream& os, const PolygonRegion& region, const Mapper& m,
                  const std::string& fill, const std::string& stroke,
                  const std::string& dash) {
    if (region.polygons.empty()) return;
    os << "<path fill=\"" << fill << "\" fill-rule=\"evenodd\" stroke=\"" << stroke
       << "\" stroke-width=\"1.5\"";
    if (!dash.empty()) os << " stroke-dasharray=\"" << dash << "\"";
    os << " d=\"";
    for (const auto& poly : region.polygons) {
        for (std::size_t i = 0; i < poly.size(); ++i) {
            os << (i == 0 ? "M" : "L") << num(m.sx(poly[i][0])) << " " << num(m.sy(poly[i][1]));
        }
        os << "Z";
    }
    os << "\"/>\n";
}

}  // namespace

void write_intervals_csv(std::ostream& os, const IntervalUnion& region) {
    os << "interval_id,a,b\n";
    for (std::size_t i = 0; i < region.intervals.size(); ++i) {
        os << i << "," << num(region.intervals[i].a) << "," << num(region.intervals[i].b) << "\n";
    }
}

void write_polygons_csv(std::ostream& os, const PolygonRegion& region) {
    os << "polygon_id,vertex_index,delta1,delta2\n";
    for (std::size_t p = 0; p < region.polygons.size(); ++p) {
        const auto& poly = region.polygons[p];
        for (std::size_t v = 0; v < poly.size(); ++v) {
            os << p << "," << v << "," << num(poly[v][0]) << "," << num(poly[v][1]) << "\n";
        }
    }
}

void write_region_svg(std::ostream& os, const PolygonRegion& region, const PolygonRegion* nominal) {
    Mapper m{region.bounds_lo[0], region.bounds_hi[0], region.bounds_lo[1], region.bounds_hi[1]};
    svg_header(os);
    // Support rectangle shading.
    os << "<rect x=\"" << num(m.sx(region.bounds_lo[0])) << "\" y=\""
       << num(m.sy(region.bounds_hi[1])) << "\" width=\""
       << num(m.sx(region.bounds_hi[0]) - m.sx(region.bounds_lo[0])) << "\" height=\""
       << num(m.sy(region.bounds_lo[1]) - m.sy(region.bounds_hi[1]))
       << "\" fill=\"#dddddd\" stroke=\"#888888\"/>\n";
    svg_polygons(os, region, m, "#9ecae1", "#08519c", "");
    if (nominal != nullptr) svg_polygons(os, *nominal, m, "none", "#555555", "6,4");
    svg_axes(os, m, "delta1", "delta2");
    os << "<g font-family=\"sans-serif\" font-size=\"13\">\n"
       << "<rect x=\"590\" y=\"50\" width=\"180\" height=\"" << (nominal ? 62 : 44)
       << "\" fill=\"white\" stroke=\"black\"/>\n"
       << "<rect x=\"600\" y=\"60\" width=\"18\" height=\"12\" fill=\"#9ecae1\" "
          "stroke=\"#08519c\"/>\n"
       << "<text x=\"625\" y=\"70\">robust stable set</text>\n"
       << "<rect x=\"600\" y=\"78\" width=\"18\" height=\"12\" fill=\"#dddddd\" "
          "stroke=\"#888888\"/>\n"
       << "<text x=\"625\" y=\"88\">support</text>\n";
    if (nominal != nullptr) {
        os << "<line x1=\"600\" y1=\"102\" x2=\"618\" y2=\"102\" stroke=\"#555555\" "
              "stroke-dasharray=\"6,4\"/>\n"
           << "<text x=\"625\" y=\"106\">nominal boundary</text>\n";
    }
    os << "</g>\n</svg>\n";
}

void write_intervals_svg(std::ostream& os, const IntervalUnion& region, double lo, double hi) {
    Mapper m{lo, hi, 0.0, 1.0};
    svg_header(os);
    double axis_y = kHeight / 2.0;
    os << "<line x1=\"" << num(kMarginL) << "\" y1=\"" << num(axis_y) << "\" x2=\""
       << num(kWidth - kMarginR) << "\" y2=\"" << num(axis_y)
       << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (const auto& iv : region.intervals) {
        double a = std::isfinite(iv.a) ? iv.a : lo;
        double b = std::isfinite(iv.b) ? iv.b : hi;
        os << "<rect x=\"" << num(m.sx(a)) << "\" y=\"" << num(axis_y - 16) << "\" width=\""
           << num(m.sx(b) - m.sx(a)) << "\" height=\"32\" fill=\"#9ecae1\" stroke=\"#08519c\"/>\n";
    }
    os << "<g font-family=\"sans-serif\" font-size=\"13\" fill=\"black\">\n";
    for (int k = 0; k <= 5; ++k) {
        double fx = lo + (hi - lo) * k / 5.0;
        os << "<line x1=\"" << num(m.sx(fx)) << "\" y1=\"" << num(axis_y) << "\" x2=\""
           << num(m.sx(fx)) << "\" y2=\"" << num(axis_y + 6) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << num(m.sx(fx) - 10) << "\" y=\"" << num(axis_y + 22) << "\">"
           << num(fx) << "</text>\n";
    }
    os << "<text x=\"" << num(kWidth / 2 - 20) << "\" y=\"" << num(axis_y + 46)
       << "\">delta1</text>\n</g>\n</svg>\n";
}

}  // namespace mixedrobust
