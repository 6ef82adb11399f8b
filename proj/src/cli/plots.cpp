#include "har_audit/cli/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace har_audit::cli {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2",
                                    "#7f7f7f", "#bcbd22", "#17becf", "#2ca02c", "#d62728"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

void open_svg(std::ostringstream& svg, double width, double height) {
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

std::string condensed_view_svg(const Matrix& window_means, const std::vector<bool>& ifc_flags,
                               std::span<const std::string> channel_names) {
    const double width = 1200, height = 420, left = 50, right = 20, top = 30, bottom = 40;
    const double plot_w = width - left - right, plot_h = height - top - bottom;
    const std::size_t n = window_means.rows();

    std::ostringstream svg;
    open_svg(svg, width, height);
    svg << "<text x=\"" << num(left) << "\" y=\"18\">Window-averaged channels; green = classified by some model, red = IFC</text>\n";
    if (n == 0) {
        svg << "</svg>\n";
        return svg.str();
    }
    const double step = plot_w / static_cast<double>(n);

    // Merge equal neighbouring flags into one band.
    std::size_t run_start = 0;
    for (std::size_t w = 1; w <= n; ++w) {
        if (w < n && ifc_flags[w] == ifc_flags[run_start]) continue;
        svg << "<rect x=\"" << num(left + step * static_cast<double>(run_start)) << "\" y=\"" << num(top)
            << "\" width=\"" << num(step * static_cast<double>(w - run_start)) << "\" height=\"" << num(plot_h)
            << "\" fill=\"" << (ifc_flags[run_start] ? "#d62728" : "#2ca02c") << "\" fill-opacity=\"0.25\"/>\n";
        run_start = w;
    }

    double lo = window_means.data().empty() ? 0.0 : *std::min_element(window_means.data().begin(), window_means.data().end());
    double hi = window_means.data().empty() ? 1.0 : *std::max_element(window_means.data().begin(), window_means.data().end());
    if (hi - lo < 1e-12) {
        lo -= 1.0;
        hi += 1.0;
    }
    const auto y_of = [&](double v) { return top + plot_h * (1.0 - (v - lo) / (hi - lo)); };

    for (std::size_t c = 0; c < window_means.cols(); ++c) {
        svg << "<polyline fill=\"none\" stroke-width=\"1.2\" stroke=\"" << kPalette[c % std::size(kPalette)] << "\" points=\"";
        for (std::size_t w = 0; w < n; ++w) {
            svg << (w ? " " : "") << num(left + step * (static_cast<double>(w) + 0.5)) << ',' << num(y_of(window_means(w, c)));
        }
        svg << "\"/>\n";
        const std::string name = c < channel_names.size() ? channel_names[c] : "ch" + std::to_string(c);
        svg << "<text x=\"" << num(left + 10 + 90 * static_cast<double>(c)) << "\" y=\"" << num(height - 12) << "\" fill=\""
            << kPalette[c % std::size(kPalette)] << "\">" << escape(name) << "</text>\n";
    }
    svg << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + plot_h) << "\" x2=\"" << num(left + plot_w) << "\" y2=\""
        << num(top + plot_h) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"4\" y=\"" << num(top + 10) << "\">" << num(hi) << "</text>\n";
    svg << "<text x=\"4\" y=\"" << num(top + plot_h) << "\">" << num(lo) << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

std::string histogram_svg(const RunLengthHistogram& histogram) {
    const double width = 640, height = 360, left = 50, right = 20, top = 30, bottom = 50;
    const double plot_w = width - left - right, plot_h = height - top - bottom;
    std::ostringstream svg;
    open_svg(svg, width, height);
    svg << "<text x=\"" << num(left) << "\" y=\"18\">Continuous IFC segments by length (windows)</text>\n";
    std::size_t peak = 0;
    for (const auto& b : histogram.bins) peak = std::max(peak, b.count);
    if (!histogram.bins.empty() && peak > 0) {
        const double slot = plot_w / static_cast<double>(histogram.bins.size());
        for (std::size_t i = 0; i < histogram.bins.size(); ++i) {
            const auto& b = histogram.bins[i];
            const double h = plot_h * static_cast<double>(b.count) / static_cast<double>(peak);
            const double x = left + slot * static_cast<double>(i) + slot * 0.1;
            svg << "<rect x=\"" << num(x) << "\" y=\"" << num(top + plot_h - h) << "\" width=\"" << num(slot * 0.8)
                << "\" height=\"" << num(h) << "\" fill=\"#d62728\"/>\n";
            svg << "<text x=\"" << num(x) << "\" y=\"" << num(top + plot_h - h - 4) << "\">" << b.count << "</text>\n";
            svg << "<text x=\"" << num(x) << "\" y=\"" << num(top + plot_h + 16) << "\">" << b.lower << '-' << b.upper
                << "</text>\n";
        }
    }
    svg << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + plot_h) << "\" x2=\"" << num(left + plot_w) << "\" y2=\""
        << num(top + plot_h) << "\" stroke=\"black\"/>\n";
    svg << "</svg>\n";
    return svg.str();
}

std::string chord_svg(std::span<const ChordEdge> edges, std::span<const std::string> class_names) {
    const double size = 560, cx = size / 2, cy = size / 2, radius = 200;
    const std::size_t n = class_names.size();
    std::ostringstream svg;
    open_svg(svg, size, size);
    svg << "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" "
           "orient=\"auto-start-reverse\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#444\"/></marker></defs>\n";
    if (n == 0) {
        svg << "</svg>\n";
        return svg.str();
    }
    const double span = 2.0 * std::numbers::pi / static_cast<double>(n);
    const double pad = std::min(0.08, span * 0.1);
    const auto mid_angle = [&](std::size_t c) { return span * (static_cast<double>(c) + 0.5) - std::numbers::pi / 2; };

    for (std::size_t c = 0; c < n; ++c) {
        const double a0 = span * static_cast<double>(c) + pad - std::numbers::pi / 2;
        const double a1 = span * static_cast<double>(c + 1) - pad - std::numbers::pi / 2;
        const int large = (a1 - a0) > std::numbers::pi ? 1 : 0;
        svg << "<path d=\"M" << num(cx + radius * std::cos(a0)) << ',' << num(cy + radius * std::sin(a0)) << " A"
            << num(radius) << ',' << num(radius) << " 0 " << large << " 1 " << num(cx + radius * std::cos(a1)) << ','
            << num(cy + radius * std::sin(a1)) << "\" fill=\"none\" stroke-width=\"14\" stroke=\""
            << kPalette[c % std::size(kPalette)] << "\"/>\n";
        const double am = mid_angle(c);
        svg << "<text text-anchor=\"middle\" x=\"" << num(cx + (radius + 28) * std::cos(am)) << "\" y=\""
            << num(cy + (radius + 28) * std::sin(am)) << "\">" << escape(class_names[c]) << "</text>\n";
    }

    std::size_t heaviest = 0;
    for (const auto& e : edges) heaviest = std::max(heaviest, e.weight);
    for (const auto& e : edges) {
        const auto from = static_cast<std::size_t>(e.true_class);
        const auto to = static_cast<std::size_t>(e.confused_class);
        if (from >= n || to >= n || heaviest == 0) continue;
        const double a = mid_angle(from), b = mid_angle(to);
        const double inner = radius - 10;
        const double stroke = 1.0 + 17.0 * static_cast<double>(e.weight) / static_cast<double>(heaviest);
        svg << "<path d=\"M" << num(cx + inner * std::cos(a)) << ',' << num(cy + inner * std::sin(a)) << " Q" << num(cx)
            << ',' << num(cy) << ' ' << num(cx + inner * std::cos(b)) << ',' << num(cy + inner * std::sin(b))
            << "\" fill=\"none\" stroke-opacity=\"0.6\" stroke-width=\"" << num(stroke) << "\" stroke=\""
            << kPalette[from % std::size(kPalette)] << "\" marker-end=\"url(#arrow)\"><title>" << escape(class_names[from])
            << " -> " << escape(class_names[to]) << ": " << e.weight << "</title></path>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace har_audit::cli
