#pragma once

// Static SVG rendering of experiment outputs: mean lines with min/max
// bands for the per-step metrics, and heatmaps for population sweeps.
// Purely a convenience layer over the CSV files; inputs are only read.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "swarmwall/csv.hpp"

namespace swarmwall {

namespace plotdetail {

constexpr double kW = 860, kH = 520;
constexpr double kL = 70, kR = 30, kT = 40, kB = 50; // margins

struct Series {
    std::string label;
    std::string color;
    std::vector<double> x, mean, lo, hi;
};

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline void svg_open(std::ofstream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
        << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
           "font-family=\"sans-serif\">" << title << "</text>\n";
}

inline void line_chart(const std::string& path, const std::string& title,
                       const std::vector<Series>& series, const std::string& x_label,
                       const std::string& y_label) {
    double xmin = 1e300, xmax = -1e300, ymin = 0.0, ymax = -1e300;
    for (const auto& s : series) {
        for (double v : s.x) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
        for (double v : s.hi) ymax = std::max(ymax, v);
    }
    if (xmax <= xmin) xmax = xmin + 1;
    ymax = std::max(ymax * 1.05, 1e-9);
    const double px = (kW - kL - kR) / (xmax - xmin);
    const double py = (kH - kT - kB) / (ymax - ymin);
    auto X = [&](double v) { return kL + (v - xmin) * px; };
    auto Y = [&](double v) { return kH - kB - (v - ymin) * py; };

    std::ofstream out(path);
    if (!out) throw Error("cannot write plot: " + path);
    svg_open(out, title);
    // axes + ticks
    out << "<line x1=\"" << kL << "\" y1=\"" << kH - kB << "\" x2=\"" << kW - kR << "\" y2=\""
        << kH - kB << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kL << "\" y1=\"" << kT << "\" x2=\"" << kL << "\" y2=\"" << kH - kB
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 5.0;
        const double yv = ymin + (ymax - ymin) * i / 5.0;
        out << "<text x=\"" << X(xv) << "\" y=\"" << kH - kB + 18
            << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
            << num(xv) << "</text>\n";
        out << "<text x=\"" << kL - 8 << "\" y=\"" << Y(yv) + 4
            << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << num(yv)
            << "</text>\n";
    }
    out << "<text x=\"" << (kL + kW - kR) / 2 << "\" y=\"" << kH - 12
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << x_label
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << (kT + kH - kB) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" transform=\"rotate(-90 16 "
        << (kT + kH - kB) / 2 << ")\">" << y_label << "</text>\n";

    double legend_y = kT + 10;
    for (const auto& s : series) {
        // min..max band
        out << "<polygon fill=\"" << s.color << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << num(X(s.x[i])) << "," << num(Y(s.hi[i])) << " ";
        for (std::size_t i = s.x.size(); i-- > 0;)
            out << num(X(s.x[i])) << "," << num(Y(s.lo[i])) << " ";
        out << "\"/>\n";
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << num(X(s.x[i])) << "," << num(Y(s.mean[i])) << " ";
        out << "\"/>\n";
        out << "<rect x=\"" << kW - kR - 150 << "\" y=\"" << legend_y - 9
            << "\" width=\"14\" height=\"4\" fill=\"" << s.color << "\"/>\n";
        out << "<text x=\"" << kW - kR - 130 << "\" y=\"" << legend_y
            << "\" font-size=\"12\" font-family=\"sans-serif\">" << s.label << "</text>\n";
        legend_y += 18;
    }
    out << "</svg>\n";
}

inline std::string heat_color(double t) {
    // white -> amber -> dark red
    t = std::clamp(t, 0.0, 1.0);
    const int r = static_cast<int>(255 - 75 * t);
    const int g = static_cast<int>(245 - 215 * t);
    const int b = static_cast<int>(235 - 215 * t);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

inline void heatmap(const std::string& path, const std::string& title, const CsvTable& table,
                    const std::string& value_col) {
    const int ca = table.column("n_a"), cb = table.column("n_b"), cv = table.column(value_col);
    std::set<double> xs, ys;
    for (const auto& row : table.rows) {
        xs.insert(row[static_cast<std::size_t>(ca)]);
        ys.insert(row[static_cast<std::size_t>(cb)]);
    }
    if (xs.empty()) throw CsvParseError("heatmap: no rows");
    const std::vector<double> xv(xs.begin(), xs.end()), yv(ys.begin(), ys.end());
    double vmax = 1e-9;
    for (const auto& row : table.rows) vmax = std::max(vmax, row[static_cast<std::size_t>(cv)]);
    const double cw = (kW - kL - kR) / static_cast<double>(xv.size());
    const double ch = (kH - kT - kB) / static_cast<double>(yv.size());
    auto xi = [&](double v) {
        return std::distance(xv.begin(), std::find(xv.begin(), xv.end(), v));
    };
    auto yi = [&](double v) {
        return std::distance(yv.begin(), std::find(yv.begin(), yv.end(), v));
    };

    std::ofstream out(path);
    if (!out) throw Error("cannot write plot: " + path);
    svg_open(out, title);
    for (const auto& row : table.rows) {
        const double v = row[static_cast<std::size_t>(cv)];
        const double x = kL + cw * static_cast<double>(xi(row[static_cast<std::size_t>(ca)]));
        const double y = kH - kB - ch * static_cast<double>(yi(row[static_cast<std::size_t>(cb)]) + 1);
        out << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(cw)
            << "\" height=\"" << num(ch) << "\" fill=\"" << heat_color(v / vmax)
            << "\" stroke=\"#999\"/>\n";
        out << "<text x=\"" << num(x + cw / 2) << "\" y=\"" << num(y + ch / 2 + 4)
            << "\" text-anchor=\"middle\" font-size=\"10\" font-family=\"sans-serif\">" << num(v)
            << "</text>\n";
    }
    for (std::size_t i = 0; i < xv.size(); ++i)
        out << "<text x=\"" << num(kL + cw * (static_cast<double>(i) + 0.5)) << "\" y=\"" << kH - kB + 18
            << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
            << num(xv[i]) << "</text>\n";
    for (std::size_t i = 0; i < yv.size(); ++i)
        out << "<text x=\"" << kL - 8 << "\" y=\"" << num(kH - kB - ch * (static_cast<double>(i) + 0.5) + 4)
            << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << num(yv[i])
            << "</text>\n";
    out << "<text x=\"" << (kL + kW - kR) / 2 << "\" y=\"" << kH - 12
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">swarm A size</text>\n";
    out << "<text x=\"16\" y=\"" << (kT + kH - kB) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" transform=\"rotate(-90 16 "
        << (kT + kH - kB) / 2 << ")\">swarm B size</text>\n";
    out << "</svg>\n";
}

} // namespace plotdetail

// agg.csv -> one coverage chart (both swarms, mean + range) and one mixing
// chart.
inline void plot_aggregate(const std::string& agg_csv, const std::string& out_dir) {
    const CsvTable t = read_csv(agg_csv);
    if (t.rows.empty()) throw CsvParseError(agg_csv + ": no data rows");
    auto col = [&](const std::string& name) {
        std::vector<double> v;
        const int c = t.column(name);
        v.reserve(t.rows.size());
        for (const auto& row : t.rows) v.push_back(row[static_cast<std::size_t>(c)]);
        return v;
    };
    const std::vector<double> steps = col("step");
    plotdetail::line_chart(
        out_dir + "/coverage.svg", "Coverage over time",
        {{"swarm A", "#e07b00", steps, col("coverage_a_mean"), col("coverage_a_min"), col("coverage_a_max")},
         {"swarm B", "#222222", steps, col("coverage_b_mean"), col("coverage_b_min"), col("coverage_b_max")}},
        "step", "coverage (%)");
    plotdetail::line_chart(out_dir + "/mixing.svg", "Mixing ratio over time",
                           {{"mixing", "#2255cc", steps, col("mixing_mean"), col("mixing_min"),
                             col("mixing_max")}},
                           "step", "mixing ratio (%)");
}

// sweep.csv -> coverage heatmaps for both swarms plus a mixing heatmap.
inline void plot_sweep(const std::string& sweep_csv, const std::string& out_dir) {
    const CsvTable t = read_csv(sweep_csv);
    if (t.rows.empty()) throw CsvParseError(sweep_csv + ": no data rows");
    plotdetail::heatmap(out_dir + "/sweep_coverage_a.svg", "Final coverage of swarm A (%)", t,
                        "coverage_a_mean");
    plotdetail::heatmap(out_dir + "/sweep_coverage_b.svg", "Final coverage of swarm B (%)", t,
                        "coverage_b_mean");
    plotdetail::heatmap(out_dir + "/sweep_mixing.svg", "Final mixing ratio (%)", t, "mixing_mean");
}

} // namespace swarmwall
