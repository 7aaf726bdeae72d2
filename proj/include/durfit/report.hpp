#ifndef DURFIT_REPORT_HPP
#define DURFIT_REPORT_HPP

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "durfit/harness.hpp"

namespace durfit {

namespace detail {

inline std::string fixed6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

inline void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << body;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace detail

// Summary table, one row per cell plus an Overall row per (method, design,
// total_n) group. Fractions with 6 decimals, LF line endings.
inline std::string render_summary_csv(const SweepResult& sweep) {
    std::vector<const CellResult*> rows;
    for (const auto& cr : sweep.cells) rows.push_back(&cr);
    std::stable_sort(rows.begin(), rows.end(), [](const CellResult* a, const CellResult* b) {
        return std::tie(a->cell.method, a->cell.design, a->cell.total_n, a->cell.scenario_id) <
               std::tie(b->cell.method, b->cell.design, b->cell.total_n, b->cell.scenario_id);
    });

    std::ostringstream os;
    os << "scenario,design,method,total_n,n_sims,min,p5,median,p95,max,mean,converged,ridged\n";
    auto emit_summary = [&os](const std::string& scenario, const std::string& design,
                              const std::string& method, int total_n, int n_sims,
                              const SabcSummary& s, const std::string& conv,
                              const std::string& ridge) {
        os << scenario << ',' << design << ',' << method << ',' << total_n << ',' << n_sims << ','
           << detail::fixed6(s.min) << ',' << detail::fixed6(s.p5) << ','
           << detail::fixed6(s.median) << ',' << detail::fixed6(s.p95) << ','
           << detail::fixed6(s.max) << ',' << detail::fixed6(s.mean) << ',' << conv << ','
           << ridge << '\n';
    };
    auto emit_overall = [&](const CellResult& last) {
        for (const auto& ov : sweep.overall) {
            if (ov.group == last.cell.group && ov.design == last.cell.design &&
                ov.method == last.cell.method && ov.total_n == last.cell.total_n) {
                emit_summary("Overall", ov.design, ov.method, ov.total_n, ov.n_sims, ov.summary,
                             "", "");
            }
        }
    };
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const CellResult& cr = *rows[i];
        if (cr.failed) {
            os << cr.cell.scenario_id << ',' << cr.cell.design << ',' << cr.cell.method << ','
               << cr.cell.total_n << ',' << cr.cell.n_sims << ",FAILED,,,,,,,\n";
        } else {
            emit_summary(std::to_string(cr.cell.scenario_id), cr.cell.design, cr.cell.method,
                         cr.cell.total_n, cr.cell.n_sims, cr.summary,
                         std::to_string(cr.converged), std::to_string(cr.ridged));
        }
        const bool group_end =
            i + 1 == rows.size() ||
            std::tie(rows[i + 1]->cell.method, rows[i + 1]->cell.design,
                     rows[i + 1]->cell.total_n) !=
                std::tie(cr.cell.method, cr.cell.design, cr.cell.total_n);
        if (group_end) emit_overall(cr);
    }
    return os.str();
}

inline void emit_summary_csv(const SweepResult& sweep, const std::string& path) {
    detail::write_file(path, render_summary_csv(sweep));
}

// Per-simulation sABC dump, so alternative percentile rules can be applied
// post hoc.
inline std::string render_persim_csv(const SweepResult& sweep) {
    std::ostringstream os;
    os << "scenario,design,method,total_n,sim_index,sabc\n";
    for (const auto& cr : sweep.cells) {
        if (cr.failed) continue;
        for (std::size_t sim = 0; sim < cr.per_sim_sabc.size(); ++sim) {
            os << cr.cell.scenario_id << ',' << cr.cell.design << ',' << cr.cell.method << ','
               << cr.cell.total_n << ',' << sim << ',' << detail::fixed6(cr.per_sim_sabc[sim])
               << '\n';
        }
    }
    return os.str();
}

inline void emit_persim_csv(const SweepResult& sweep, const std::string& path) {
    detail::write_file(path, render_persim_csv(sweep));
}

// Fitted-curve grid dump for one cell: D, truth, and the first k replicate
// curves on the integration grid.
inline std::string render_curve_dump(const CellResult& cr, double step) {
    const auto grid = uniform_grid(kDurationMin, kDurationMax, step);
    std::ostringstream os;
    os << "D,truth";
    for (std::size_t k = 0; k < cr.sampled_curves.size(); ++k) os << ",sim_" << k;
    os << '\n';
    for (std::size_t i = 0; i < grid.size(); ++i) {
        os << detail::fixed6(grid[i]) << ','
           << detail::fixed6(true_probability(cr.cell.scenario_id, grid[i]));
        for (const auto& curve : cr.sampled_curves) os << ',' << detail::fixed6(curve[i]);
        os << '\n';
    }
    return os.str();
}

inline void emit_curve_dump(const CellResult& cr, double step, const std::string& path) {
    detail::write_file(path, render_curve_dump(cr, step));
}

namespace detail {

struct SvgCanvas {
    std::ostringstream body;
    double width, height;
    double margin = 45.0;

    SvgCanvas(double w, double h) : width(w), height(h) {}

    double px(double x, double x0, double x1) const {
        return margin + (x - x0) / (x1 - x0) * (width - 2 * margin);
    }
    double py(double y, double y0, double y1) const {
        return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin);
    }

    std::string finish() const {
        std::ostringstream os;
        os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
           << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
           << body.str() << "</svg>\n";
        return os.str();
    }
};

inline void svg_polyline(SvgCanvas& svg, const std::vector<double>& xs,
                         const std::vector<double>& ys, double x0, double x1, double y0, double y1,
                         const std::string& stroke, double stroke_width, double opacity) {
    svg.body << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
             << stroke_width << "\" stroke-opacity=\"" << opacity << "\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) svg.body << ' ';
        svg.body << fixed6(svg.px(xs[i], x0, x1)) << ',' << fixed6(svg.py(ys[i], y0, y1));
    }
    svg.body << "\"/>\n";
}

inline void svg_axes(SvgCanvas& svg, const std::string& title) {
    svg.body << "<rect x=\"" << svg.margin << "\" y=\"" << svg.margin << "\" width=\""
             << svg.width - 2 * svg.margin << "\" height=\"" << svg.height - 2 * svg.margin
             << "\" fill=\"none\" stroke=\"black\"/>\n"
             << "<text x=\"" << svg.width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
             << "font-family=\"sans-serif\" font-size=\"13\">" << title << "</text>\n";
}

}  // namespace detail

// Truth curve (black) plus the sampled prediction curves (red) for one cell.
inline std::string render_cell_svg(const CellResult& cr, double step) {
    const auto grid = uniform_grid(kDurationMin, kDurationMax, step);
    std::vector<double> truth;
    truth.reserve(grid.size());
    for (double d : grid) truth.push_back(true_probability(cr.cell.scenario_id, d));

    detail::SvgCanvas svg(520, 380);
    detail::svg_axes(svg, "Scenario " + std::to_string(cr.cell.scenario_id) + " " +
                              cr.cell.design + " N=" + std::to_string(cr.cell.total_n) + " " +
                              cr.cell.method);
    for (const auto& curve : cr.sampled_curves)
        detail::svg_polyline(svg, grid, curve, kDurationMin, kDurationMax, 0.0, 1.0, "red", 0.6,
                             0.35);
    detail::svg_polyline(svg, grid, truth, kDurationMin, kDurationMax, 0.0, 1.0, "black", 1.8,
                         1.0);
    return svg.finish();
}

// Box-and-whisker style summary of sABC by cell across the sweep.
inline std::string render_sweep_svg(const SweepResult& sweep) {
    std::vector<const CellResult*> rows;
    for (const auto& cr : sweep.cells)
        if (!cr.failed) rows.push_back(&cr);
    double ymax = 0.05;
    for (const auto* cr : rows) ymax = std::max(ymax, cr->summary.max);
    ymax *= 1.05;

    detail::SvgCanvas svg(std::max(520.0, 30.0 * rows.size() + 90.0), 420);
    detail::svg_axes(svg, "sABC by cell");
    const double x0 = 0.0, x1 = static_cast<double>(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const SabcSummary& s = rows[i]->summary;
        const double cx = static_cast<double>(i) + 0.5;
        const double half = 0.3;
        auto X = [&](double x) { return svg.px(x, x0, x1); };
        auto Y = [&](double y) { return svg.py(y, 0.0, ymax); };
        // whiskers min..max, box p5..p95, line at median
        svg.body << "<line x1=\"" << X(cx) << "\" y1=\"" << Y(s.min) << "\" x2=\"" << X(cx)
                 << "\" y2=\"" << Y(s.max) << "\" stroke=\"black\"/>\n";
        svg.body << "<rect x=\"" << X(cx - half) << "\" y=\"" << Y(s.p95) << "\" width=\""
                 << X(cx + half) - X(cx - half) << "\" height=\"" << Y(s.p5) - Y(s.p95)
                 << "\" fill=\"steelblue\" fill-opacity=\"0.6\" stroke=\"black\"/>\n";
        svg.body << "<line x1=\"" << X(cx - half) << "\" y1=\"" << Y(s.median) << "\" x2=\""
                 << X(cx + half) << "\" y2=\"" << Y(s.median) << "\" stroke=\"black\"/>\n";
        svg.body << "<text x=\"" << X(cx) << "\" y=\"" << svg.height - svg.margin + 14
                 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"8\">s"
                 << rows[i]->cell.scenario_id << ' ' << rows[i]->cell.design << ' '
                 << rows[i]->cell.method << "</text>\n";
    }
    return svg.finish();
}

}  // namespace durfit

#endif
