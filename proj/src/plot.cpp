#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "subscan/error.hpp"
#include "subscan/experiment.hpp"

namespace subscan {

double median(std::vector<double> values) {
    if (values.empty()) throw InvalidParameter("median of an empty set");
    std::sort(values.begin(), values.end());
    const std::size_t h = values.size() / 2;
    return values.size() % 2 == 1 ? values[h] : 0.5 * (values[h - 1] + values[h]);
}

std::vector<Panel> summarize(const std::vector<ResultRow>& rows) {
    using Key = std::tuple<std::size_t, std::size_t, int>;
    std::map<Key, std::map<double, std::vector<double>>> groups;
    std::map<Key, double> floors;
    for (const auto& r : rows) {
        const Key key{r.m, r.n, static_cast<int>(r.kind)};
        groups[key][r.multiplier].push_back(r.pvalue);
        auto [it, inserted] = floors.emplace(key, r.floor);
        if (!inserted) it->second = std::min(it->second, r.floor);
    }
    std::vector<Panel> panels;
    for (const auto& [key, by_mult] : groups) {
        Panel p;
        p.m = std::get<0>(key);
        p.n = std::get<1>(key);
        p.kind = static_cast<PermutationKind>(std::get<2>(key));
        p.floor = floors[key];
        for (const auto& [mult, values] : by_mult) {
            const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
            p.points.push_back({mult, median(values), *lo, *hi, values.size()});
        }
        panels.push_back(std::move(p));
    }
    return panels;
}

namespace {

constexpr double kWidth = 1600.0;
constexpr double kHeight = 900.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

struct Frame {
    double x0, y0, w, h;  // plot area in SVG units
    double xmin, xmax;

    double px(double mult) const { return x0 + (mult - xmin) / (xmax - xmin) * w; }
    double py(double p) const { return y0 + (1.0 - p) * h; }
};

void draw_axes(std::ostringstream& svg, const Frame& f, const std::string& title) {
    svg << "<g class=\"axes\" stroke=\"#333\" fill=\"none\">\n";
    svg << "<rect x=\"" << num(f.x0) << "\" y=\"" << num(f.y0) << "\" width=\"" << num(f.w) << "\" height=\""
        << num(f.h) << "\"/>\n";
    svg << "</g>\n";
    svg << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">\n";
    svg << "<text x=\"" << num(f.x0 + f.w / 2) << "\" y=\"" << num(f.y0 - 8) << "\" text-anchor=\"middle\">" << title
        << "</text>\n";
    for (int i = 0; i <= 4; ++i) {
        const double p = i / 4.0;
        svg << "<text x=\"" << num(f.x0 - 6) << "\" y=\"" << num(f.py(p) + 4) << "\" text-anchor=\"end\">" << num(p)
            << "</text>\n";
    }
    const int ticks = 4;
    for (int i = 0; i <= ticks; ++i) {
        const double x = f.xmin + (f.xmax - f.xmin) * i / ticks;
        svg << "<text x=\"" << num(f.px(x)) << "\" y=\"" << num(f.y0 + f.h + 16) << "\" text-anchor=\"middle\">"
            << num(x) << "</text>\n";
    }
    svg << "<text x=\"" << num(f.x0 + f.w / 2) << "\" y=\"" << num(f.y0 + f.h + 32)
        << "\" text-anchor=\"middle\">theta / theta_crit</text>\n";
    svg << "<text x=\"" << num(f.x0 - 40) << "\" y=\"" << num(f.y0 + f.h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 "
        << num(f.x0 - 40) << ' ' << num(f.y0 + f.h / 2) << ")\">p-value</text>\n";
    svg << "</g>\n";
}

}  // namespace

std::string render_svg(const std::vector<ResultRow>& rows) {
    const auto panels = summarize(rows);

    double xmin = 0.5, xmax = 1.5;
    if (!rows.empty()) {
        xmin = xmax = rows.front().multiplier;
        for (const auto& r : rows) {
            xmin = std::min(xmin, r.multiplier);
            xmax = std::max(xmax, r.multiplier);
        }
        xmin = std::min(xmin, 1.0);
        xmax = std::max(xmax, 1.0);
        const double pad = std::max(0.05, 0.05 * (xmax - xmin));
        xmin -= pad;
        xmax += pad;
    }

    const std::size_t count = std::max<std::size_t>(panels.size(), 1);
    const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count))));
    const std::size_t grid_rows = (count + cols - 1) / cols;
    const double cell_w = kWidth / static_cast<double>(cols);
    const double cell_h = kHeight / static_cast<double>(grid_rows);

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t i = 0; i < count; ++i) {
        const double cx = static_cast<double>(i % cols) * cell_w;
        const double cy = static_cast<double>(i / cols) * cell_h;
        const Frame f{cx + 70, cy + 30, cell_w - 100, cell_h - 80, xmin, xmax};

        if (panels.empty()) {
            draw_axes(svg, f, "no data");
            continue;
        }
        const Panel& p = panels[i];
        draw_axes(svg, f,
                  "(m, n) = (" + std::to_string(p.m) + ", " + std::to_string(p.n) + "), " +
                      std::string(to_string(p.kind)));

        svg << "<line class=\"reference\" x1=\"" << num(f.px(1.0)) << "\" y1=\"" << num(f.y0) << "\" x2=\""
            << num(f.px(1.0)) << "\" y2=\"" << num(f.y0 + f.h) << "\" stroke=\"#999\" stroke-dasharray=\"4 4\"/>\n";
        svg << "<line class=\"floor\" x1=\"" << num(f.x0) << "\" y1=\"" << num(f.py(p.floor)) << "\" x2=\""
            << num(f.x0 + f.w) << "\" y2=\"" << num(f.py(p.floor)) << "\" stroke=\"#c33\" stroke-dasharray=\"6 3\"/>\n";

        if (p.points.size() > 1) {
            svg << "<polygon class=\"band\" fill=\"#36c\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
            for (const auto& pt : p.points) svg << num(f.px(pt.multiplier)) << ',' << num(f.py(pt.max)) << ' ';
            for (auto it = p.points.rbegin(); it != p.points.rend(); ++it) {
                svg << num(f.px(it->multiplier)) << ',' << num(f.py(it->min)) << ' ';
            }
            svg << "\"/>\n";
            svg << "<polyline class=\"median\" fill=\"none\" stroke=\"#36c\" stroke-width=\"2\" points=\"";
            for (const auto& pt : p.points) svg << num(f.px(pt.multiplier)) << ',' << num(f.py(pt.median)) << ' ';
            svg << "\"/>\n";
        }
        for (const auto& pt : p.points) {
            svg << "<circle class=\"point\" cx=\"" << num(f.px(pt.multiplier)) << "\" cy=\"" << num(f.py(pt.median))
                << "\" r=\"3\" fill=\"#36c\"/>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

void emit_plot(const std::filesystem::path& csv_path, const std::filesystem::path& svg_path) {
    const auto rows = parse_csv_file(csv_path);
    std::ofstream out(svg_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + svg_path.string() + " for writing");
    out << render_svg(rows);
    if (!out) throw Error("failed writing " + svg_path.string());
}

}  // namespace subscan
