#include "rdmass/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "rdmass/errors.hpp"

namespace rdmass {

namespace {

constexpr int kWidth = 960;
constexpr int kPanelHeight = 250;
constexpr int kMarginLeft = 80, kMarginRight = 24, kMarginTop = 34, kMarginBottom = 46;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

std::string fmt_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

struct Series {
    std::string label;
    std::vector<double> y;
};

// One chart panel: shared x values, several named series.
void render_panel(std::ofstream& os, int panel_index, const std::string& title,
                  const std::string& x_label, const std::vector<double>& x,
                  const std::vector<Series>& series) {
    const int top = panel_index * kPanelHeight + kMarginTop;
    const double pw = kWidth - kMarginLeft - kMarginRight;
    const double ph = kPanelHeight - kMarginTop - kMarginBottom;

    double xmin = x.front(), xmax = x.back();
    if (xmax - xmin <= 0.0) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    double ymin = series[0].y[0], ymax = ymin;
    for (const Series& s : series)
        for (double v : s.y) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    const double yscale = std::max(std::abs(ymin), std::abs(ymax));
    if (ymax - ymin <= 1e-12 * std::max(1.0, yscale)) {
        const double pad = std::max(0.5, 0.05 * yscale);
        ymin -= pad;
        ymax += pad;
    } else {
        const double pad = 0.05 * (ymax - ymin);
        ymin -= pad;
        ymax += pad;
    }

    auto px = [&](double v) { return kMarginLeft + (v - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double v) { return top + ph - (v - ymin) / (ymax - ymin) * ph; };

    os << "<text x=\"" << kMarginLeft << "\" y=\"" << top - 14
       << "\" font-family=\"sans-serif\" font-size=\"14\" font-weight=\"bold\">" << title
       << "</text>\n";
    os << "<rect x=\"" << kMarginLeft << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\""
       << ph << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";

    for (int k = 0; k <= 4; ++k) {
        const double tx = xmin + (xmax - xmin) * k / 4.0;
        const double ty = ymin + (ymax - ymin) * k / 4.0;
        const double gx = px(tx), gy = py(ty);
        os << "<line x1=\"" << gx << "\" y1=\"" << top + ph << "\" x2=\"" << gx << "\" y2=\""
           << top + ph + 5 << "\" stroke=\"#444\"/>\n";
        os << "<text x=\"" << gx << "\" y=\"" << top + ph + 18
           << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">"
           << fmt_num(tx) << "</text>\n";
        os << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << gy << "\" x2=\"" << kMarginLeft
           << "\" y2=\"" << gy << "\" stroke=\"#444\"/>\n";
        os << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << gy + 3
           << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" << fmt_num(ty)
           << "</text>\n";
    }
    os << "<text x=\"" << kMarginLeft + pw / 2 << "\" y=\"" << top + ph + 34
       << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" << x_label
       << "</text>\n";

    for (size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % std::size(kPalette)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        char buf[48];
        for (size_t k = 0; k < x.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x[k]), py(series[s].y[k]));
            os << buf;
        }
        os << "\"/>\n";
        os << "<text x=\"" << kMarginLeft + pw - 6 << "\" y=\"" << top + 14 + 13 * s
           << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\" fill=\"" << color
           << "\">" << series[s].label << "</text>\n";
    }
}

} // namespace

void emit_svg(const Monitor& monitor, const std::string& path) {
    const auto& recs = monitor.records();
    if (recs.empty()) throw ArgumentError("cannot chart an empty record series");
    const int m = static_cast<int>(recs[0].l1.size());
    const bool have_windows = !monitor.windows().empty();
    const int panels = have_windows ? 3 : 2;

    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("cannot open SVG for writing: " + path);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
       << panels * kPanelHeight << "\" viewBox=\"0 0 " << kWidth << " " << panels * kPanelHeight
       << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    std::vector<double> t;
    for (const auto& r : recs) t.push_back(r.t);

    std::vector<Series> linf(m);
    for (int i = 0; i < m; ++i) {
        linf[i].label = "sup u_" + std::to_string(i + 1);
        for (const auto& r : recs) linf[i].y.push_back(r.linf[i]);
    }
    render_panel(os, 0, "Per-species sup norm", "t", t, linf);

    std::vector<Series> mass(1);
    mass[0].label = "total mass";
    for (const auto& r : recs) mass[0].y.push_back(r.total_weighted_mass);
    render_panel(os, 1, "Weighted total mass", "t", t, mass);

    if (have_windows) {
        const auto& wins = monitor.windows();
        std::vector<double> tau;
        for (const auto& w : wins) tau.push_back(w.tau);
        std::vector<Series> agg;
        Series sup{"window sup", {}};
        for (const auto& w : wins) sup.y.push_back(w.window_sup_linf);
        agg.push_back(std::move(sup));
        for (int i = 0; i < m; ++i) {
            Series l2{"L2 u_" + std::to_string(i + 1), {}};
            Series ti{"int u_" + std::to_string(i + 1), {}};
            for (const auto& w : wins) {
                l2.y.push_back(w.window_l2[i]);
                ti.y.push_back(w.time_integral_sup[i]);
            }
            agg.push_back(std::move(l2));
            agg.push_back(std::move(ti));
        }
        render_panel(os, 2, "Window aggregates", "tau", tau, agg);
    }

    os << "</svg>\n";
    if (!os) throw IoError("SVG write failed: " + path);
}

} // namespace rdmass
