#include "persist/cli/plot.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <functional>
#include <limits>
#include <regex>
#include <sstream>

namespace persist::cli {

namespace {

constexpr double kPanelWidth = 420.0;
constexpr double kPanelHeight = 260.0;
constexpr double kMarginLeft = 60.0;
constexpr double kMarginTop = 40.0;
constexpr double kGap = 70.0;
constexpr std::array<const char*, 8> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

struct Panel {
    const char* title;
    const char* x_label;
    std::function<double(const train::MetricsRecord&)> x;
    std::function<double(const train::MetricsRecord&)> y;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += ch;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!(lo <= hi)) lo = 0.0, hi = 1.0;
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

} // namespace

std::string series_label(const std::filesystem::path& csv) {
    static const std::regex pattern(R"(.*_m(\d+)_K(\d+)(_adaptive)?)");
    const std::string stem = csv.stem().string();
    std::smatch match;
    if (!std::regex_match(stem, match, pattern)) return stem;
    std::string label = "K=" + match[2].str() + ", m=" + match[1].str();
    if (match[3].matched) label += ", adaptive lr";
    return label;
}

std::string render_figure(const std::vector<Series>& series) {
    const std::array<Panel, 4> panels = {{
        {"Test accuracy", "wall-clock seconds", [](const auto& r) { return r.wall_clock_s; },
         [](const auto& r) { return r.test_acc; }},
        {"Test accuracy", "epoch", [](const auto& r) { return static_cast<double>(r.epoch); },
         [](const auto& r) { return r.test_acc; }},
        {"Test loss", "wall-clock seconds", [](const auto& r) { return r.wall_clock_s; },
         [](const auto& r) { return r.test_loss; }},
        {"Test loss", "epoch", [](const auto& r) { return static_cast<double>(r.epoch); },
         [](const auto& r) { return r.test_loss; }},
    }};

    const double width = kMarginLeft + 2 * kPanelWidth + kGap + 30.0;
    const double legend_top = kMarginTop + 2 * kPanelHeight + kGap + 20.0;
    const double height = legend_top + 20.0 * static_cast<double>(series.size()) + 20.0;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t p = 0; p < panels.size(); ++p) {
        const auto& panel = panels[p];
        const double left = kMarginLeft + static_cast<double>(p % 2) * (kPanelWidth + kGap);
        const double top = kMarginTop + static_cast<double>(p / 2) * (kPanelHeight + kGap);

        Range xr, yr;
        for (const auto& s : series) {
            for (const auto& r : s.records) {
                xr.add(panel.x(r));
                yr.add(panel.y(r));
            }
        }
        xr.finish();
        yr.finish();
        const auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * kPanelWidth; };
        const auto py = [&](double y) { return top + kPanelHeight - (y - yr.lo) / (yr.hi - yr.lo) * kPanelHeight; };

        svg << "<g class=\"panel\">\n";
        svg << "<text x=\"" << num(left + kPanelWidth / 2) << "\" y=\"" << num(top - 12)
            << "\" text-anchor=\"middle\" font-size=\"13\">" << panel.title << " vs " << panel.x_label << "</text>\n";
        svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(kPanelWidth)
            << "\" height=\"" << num(kPanelHeight) << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (int t = 0; t <= 4; ++t) {
            const double fx = xr.lo + (xr.hi - xr.lo) * t / 4.0;
            const double fy = yr.lo + (yr.hi - yr.lo) * t / 4.0;
            svg << "<text x=\"" << num(px(fx)) << "\" y=\"" << num(top + kPanelHeight + 14)
                << "\" text-anchor=\"middle\">" << tick(fx) << "</text>\n";
            svg << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(fy) + 4) << "\" text-anchor=\"end\">"
                << tick(fy) << "</text>\n";
        }
        svg << "<text x=\"" << num(left + kPanelWidth / 2) << "\" y=\"" << num(top + kPanelHeight + 30)
            << "\" text-anchor=\"middle\">" << panel.x_label << "</text>\n";

        for (std::size_t s = 0; s < series.size(); ++s) {
            svg << "<polyline fill=\"none\" stroke=\"" << kColors[s % kColors.size()]
                << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < series[s].records.size(); ++i) {
                const auto& r = series[s].records[i];
                svg << (i ? " " : "") << num(px(panel.x(r))) << "," << num(py(panel.y(r)));
            }
            svg << "\"/>\n";
        }
        svg << "</g>\n";
    }

    for (std::size_t s = 0; s < series.size(); ++s) {
        const double y = legend_top + 20.0 * static_cast<double>(s);
        svg << "<line x1=\"" << num(kMarginLeft) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kMarginLeft + 24)
            << "\" y2=\"" << num(y) << "\" stroke=\"" << kColors[s % kColors.size()] << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << num(kMarginLeft + 30) << "\" y=\"" << num(y + 4) << "\">" << escape(series[s].label)
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace persist::cli
