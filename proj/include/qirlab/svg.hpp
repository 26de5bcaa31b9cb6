#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace qirlab {

// Minimal static SVG line/scatter charts with shaded bands; enough for the
// impulse-response and quantile-sweep figures without a plotting dependency.
struct SvgSeries {
    std::vector<double> x, y;
    std::string label;
    std::string color = "#1f6fb2";
    bool line = true;
    bool markers = false;
    bool dashed = false;
};

struct SvgBand {
    std::vector<double> x, lo, hi;
    std::string color = "#1f6fb2";
    double opacity = 0.2;
};

struct SvgChart {
    std::string title;
    std::string x_label, y_label;
    std::vector<SvgSeries> series;
    std::vector<SvgBand> bands;
    std::vector<std::string> metadata;  // embedded as a <desc> block
    int width = 640, height = 420;
    bool zero_line = true;
};

void write_svg_chart(const std::filesystem::path& path, const SvgChart& chart);

}  // namespace qirlab
