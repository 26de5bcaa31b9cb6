#include "qirlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qirlab {

namespace {

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void take(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!(lo < hi)) {
            lo -= 1.0;
            hi += 1.0;
        }
        const double m = 0.05 * (hi - lo);
        lo -= m;
        hi += m;
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

std::string escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

// Round tick spacing to 1/2/5 times a power of ten.
double nice_step(double span, int target_ticks) {
    const double raw = span / std::max(target_ticks, 2);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double frac = raw / mag;
    if (frac <= 1.0) return mag;
    if (frac <= 2.0) return 2.0 * mag;
    if (frac <= 5.0) return 5.0 * mag;
    return 10.0 * mag;
}

}  // namespace

void write_svg_chart(const std::filesystem::path& path, const SvgChart& chart) {
    Range xr, yr;
    for (const auto& s : chart.series) {
        for (const double v : s.x) xr.take(v);
        for (const double v : s.y) yr.take(v);
    }
    for (const auto& b : chart.bands) {
        for (const double v : b.x) xr.take(v);
        for (const double v : b.lo) yr.take(v);
        for (const double v : b.hi) yr.take(v);
    }
    if (chart.zero_line) yr.take(0.0);
    if (!std::isfinite(xr.lo) || !std::isfinite(yr.lo))
        throw std::invalid_argument("svg chart: no finite data");
    xr.pad();
    yr.pad();

    const double ml = 62, mr = 16, mt = chart.title.empty() ? 16 : 34, mb = 46;
    const double pw = chart.width - ml - mr;
    const double ph = chart.height - mt - mb;
    const auto px = [&](double x) { return ml + pw * (x - xr.lo) / (xr.hi - xr.lo); };
    const auto py = [&](double y) { return mt + ph * (yr.hi - y) / (yr.hi - yr.lo); };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width << "\" height=\""
        << chart.height << "\" viewBox=\"0 0 " << chart.width << " " << chart.height << "\">\n";
    if (!chart.metadata.empty()) {
        out << "<desc>";
        for (const auto& line : chart.metadata) out << escape(line) << "\n";
        out << "</desc>\n";
    }
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // Axes, ticks, grid.
    const double xstep = nice_step(xr.hi - xr.lo, 6);
    const double ystep = nice_step(yr.hi - yr.lo, 6);
    out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (double x = std::ceil(xr.lo / xstep) * xstep; x <= xr.hi + 1e-9 * xstep; x += xstep) {
        out << "<line x1=\"" << fmt(px(x)) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(px(x))
            << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"#eee\"/>\n";
        out << "<text x=\"" << fmt(px(x)) << "\" y=\"" << fmt(mt + ph + 16)
            << "\" text-anchor=\"middle\">" << fmt(std::abs(x) < 1e-12 ? 0.0 : x) << "</text>\n";
    }
    for (double y = std::ceil(yr.lo / ystep) * ystep; y <= yr.hi + 1e-9 * ystep; y += ystep) {
        out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(py(y)) << "\" x2=\"" << fmt(ml + pw)
            << "\" y2=\"" << fmt(py(y)) << "\" stroke=\"#eee\"/>\n";
        out << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(py(y) + 4)
            << "\" text-anchor=\"end\">" << fmt(std::abs(y) < 1e-12 ? 0.0 : y) << "</text>\n";
    }
    out << "</g>\n";
    if (chart.zero_line && yr.lo < 0.0 && yr.hi > 0.0)
        out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(py(0)) << "\" x2=\"" << fmt(ml + pw)
            << "\" y2=\"" << fmt(py(0)) << "\" stroke=\"#999\" stroke-width=\"1\"/>\n";
    out << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(pw)
        << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"#333\"/>\n";

    for (const auto& b : chart.bands) {
        if (b.x.empty()) continue;
        out << "<polygon fill=\"" << b.color << "\" fill-opacity=\"" << b.opacity
            << "\" stroke=\"none\" points=\"";
        for (std::size_t i = 0; i < b.x.size(); ++i)
            out << fmt(px(b.x[i])) << "," << fmt(py(b.hi[i])) << " ";
        for (std::size_t i = b.x.size(); i-- > 0;)
            out << fmt(px(b.x[i])) << "," << fmt(py(b.lo[i])) << " ";
        out << "\"/>\n";
    }

    for (const auto& s : chart.series) {
        if (s.line && s.x.size() > 1) {
            out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\"";
            if (s.dashed) out << " stroke-dasharray=\"5,4\"";
            out << " points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                out << fmt(px(s.x[i])) << "," << fmt(py(s.y[i])) << " ";
            out << "\"/>\n";
        }
        if (s.markers)
            for (std::size_t i = 0; i < s.x.size(); ++i)
                out << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i]))
                    << "\" r=\"2.4\" fill=\"" << s.color << "\"/>\n";
    }

    // Legend and labels.
    double ly = mt + 14;
    for (const auto& s : chart.series) {
        if (s.label.empty()) continue;
        out << "<line x1=\"" << fmt(ml + pw - 120) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\""
            << fmt(ml + pw - 100) << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << s.color
            << "\" stroke-width=\"2\"";
        if (s.dashed) out << " stroke-dasharray=\"5,4\"";
        out << "/>\n";
        out << "<text x=\"" << fmt(ml + pw - 94) << "\" y=\"" << fmt(ly)
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">" << escape(s.label)
            << "</text>\n";
        ly += 15;
    }
    if (!chart.title.empty())
        out << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"20\" text-anchor=\"middle\" "
               "font-family=\"sans-serif\" font-size=\"14\" fill=\"#111\">"
            << escape(chart.title) << "</text>\n";
    if (!chart.x_label.empty())
        out << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(chart.height - 10)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
               "fill=\"#111\">"
            << escape(chart.x_label) << "</text>\n";
    if (!chart.y_label.empty())
        out << "<text x=\"14\" y=\"" << fmt(mt + ph / 2)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
               "fill=\"#111\" transform=\"rotate(-90 14 "
            << fmt(mt + ph / 2) << ")\">" << escape(chart.y_label) << "</text>\n";
    out << "</svg>\n";
}

}  // namespace qirlab
