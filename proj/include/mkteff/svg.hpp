#pragma once

// Self-contained SVG line charts: the efficiency-degree chart with dashed
// confidence bands and shaded historical events, and a raw-returns chart.
// Output is a pure function of the inputs (no timestamps, no randomness).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "mkteff/bootstrap.hpp"
#include "mkteff/events.hpp"
#include "mkteff/month.hpp"
#include "mkteff/series.hpp"
#include "mkteff/tvar.hpp"

namespace mkteff {
namespace svg_detail {

inline std::string fx(double v) {
    char buf[40];
    if (std::abs(v) < 5e-3) v = 0.0;  // avoid "-0.00"
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string flabel(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Frame {
    static constexpr double width = 960.0;
    static constexpr double height = 480.0;
    static constexpr double left = 70.0;
    static constexpr double right = 20.0;
    static constexpr double top = 44.0;
    static constexpr double bottom = 52.0;

    Month first{1900, 1};
    int n_months = 1;
    double ymin = 0.0;
    double ymax = 1.0;

    [[nodiscard]] double plot_w() const { return width - left - right; }
    [[nodiscard]] double plot_h() const { return height - top - bottom; }
    [[nodiscard]] double cell_w() const { return plot_w() / n_months; }
    [[nodiscard]] double x_index(double i) const { return left + (i + 0.5) * cell_w(); }
    [[nodiscard]] double x(Month m) const { return x_index(m.diff(first)); }
    [[nodiscard]] double y(double v) const {
        return top + (ymax - v) / (ymax - ymin) * plot_h();
    }
};

inline double nice_step(double span, int target_ticks) {
    const double raw = span / std::max(1, target_ticks);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
        if (raw <= m * mag * (1.0 + 1e-12)) return m * mag;
    return 10.0 * mag;
}

inline int year_step(int span_years) {
    for (int s : {1, 2, 5, 10, 20, 50})
        if (span_years / s <= 10) return s;
    return 100;
}

/// Polyline path split at non-finite points.
inline void append_series_path(std::ostringstream& out, const Frame& f,
                               const std::vector<double>& values, const std::string& stroke,
                               const std::string& extra) {
    std::string d;
    bool open = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            open = false;
            continue;
        }
        d += open ? " L " : " M ";
        d += fx(f.x_index(double(i)));
        d += ' ';
        d += fx(f.y(values[i]));
        open = true;
    }
    if (d.empty()) return;
    out << "  <path fill=\"none\" stroke=\"" << stroke << "\" " << extra << " d=\"" << d
        << "\"/>\n";
}

inline void append_axes(std::ostringstream& out, const Frame& f) {
    // y grid and labels
    const double step = nice_step(f.ymax - f.ymin, 5);
    const double first_tick = std::ceil(f.ymin / step - 1e-9) * step;
    out << "  <g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (double v = first_tick; v <= f.ymax + 1e-9 * step; v += step) {
        const double yy = f.y(v);
        out << "    <line x1=\"" << fx(f.left) << "\" y1=\"" << fx(yy) << "\" x2=\""
            << fx(f.width - f.right) << "\" y2=\"" << fx(yy)
            << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out << "    <text x=\"" << fx(f.left - 6) << "\" y=\"" << fx(yy + 4)
            << "\" text-anchor=\"end\">" << flabel(std::abs(v) < 1e-12 ? 0.0 : v) << "</text>\n";
    }
    // x ticks at January of stepped years
    const Month last = f.first.plus(f.n_months - 1);
    const int ystep = year_step(last.year - f.first.year + 1);
    int y0 = f.first.year - (f.first.year % ystep);
    if (Month{y0, 1} < f.first) y0 += ystep;
    for (int yr = y0; yr <= last.year; yr += ystep) {
        const Month tick{yr, 1};
        if (tick < f.first || last < tick) continue;
        const double xx = f.x(tick);
        out << "    <line x1=\"" << fx(xx) << "\" y1=\"" << fx(f.height - f.bottom) << "\" x2=\""
            << fx(xx) << "\" y2=\"" << fx(f.height - f.bottom + 5)
            << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        out << "    <text x=\"" << fx(xx) << "\" y=\"" << fx(f.height - f.bottom + 18)
            << "\" text-anchor=\"middle\">" << yr << "</text>\n";
    }
    out << "  </g>\n";
    out << "  <rect x=\"" << fx(f.left) << "\" y=\"" << fx(f.top) << "\" width=\""
        << fx(f.plot_w()) << "\" height=\"" << fx(f.plot_h())
        << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
}

/// Shaded ranges for spanning events, dashed vertical markers for point
/// events; events wholly outside the charted window are skipped.
inline void append_events(std::ostringstream& out, const Frame& f, const EventTable& events) {
    const Month last = f.first.plus(f.n_months - 1);
    for (const Event& ev : events.rows) {
        if (last < ev.start || ev.effective_end() < f.first) continue;
        const Month s = ev.start < f.first ? f.first : ev.start;
        const Month e = last < ev.effective_end() ? last : ev.effective_end();
        if (ev.is_point()) {
            const double xx = f.x(s);
            out << "  <line x1=\"" << fx(xx) << "\" y1=\"" << fx(f.top) << "\" x2=\"" << fx(xx)
                << "\" y2=\"" << fx(f.height - f.bottom)
                << "\" stroke=\"#666666\" stroke-width=\"1\" stroke-dasharray=\"2 3\">"
                << "<title>" << xml_escape(ev.label + " (" + ev.start.str() + ")")
                << "</title></line>\n";
        } else {
            const double x0 = f.x(s) - 0.5 * f.cell_w();
            const double x1 = f.x(e) + 0.5 * f.cell_w();
            out << "  <rect x=\"" << fx(x0) << "\" y=\"" << fx(f.top) << "\" width=\""
                << fx(x1 - x0) << "\" height=\"" << fx(f.plot_h())
                << "\" fill=\"#b0b0b0\" fill-opacity=\"0.3\"><title>"
                << xml_escape(ev.label + " (" + ev.start.str() + " to " +
                              ev.effective_end().str() + ")")
                << "</title></rect>\n";
        }
    }
}

inline void open_chart(std::ostringstream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << int(Frame::width)
        << "\" height=\"" << int(Frame::height) << "\" viewBox=\"0 0 " << int(Frame::width) << ' '
        << int(Frame::height) << "\">\n";
    out << "  <rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    out << "  <text x=\"" << fx(Frame::width / 2)
        << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\" "
           "fill=\"#111111\">"
        << xml_escape(title) << "</text>\n";
}

inline void legend_entry(std::ostringstream& out, double x, double y, const std::string& stroke,
                         const std::string& dash, const std::string& text) {
    out << "  <line x1=\"" << fx(x) << "\" y1=\"" << fx(y) << "\" x2=\"" << fx(x + 26)
        << "\" y2=\"" << fx(y) << "\" stroke=\"" << stroke << "\" stroke-width=\"1.6\"";
    if (!dash.empty()) out << " stroke-dasharray=\"" << dash << "\"";
    out << "/>\n  <text x=\"" << fx(x + 32) << "\" y=\"" << fx(y + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">" << xml_escape(text)
        << "</text>\n";
}

inline std::string percent_label(double level) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g%%", level * 100.0);
    return buf;
}

}  // namespace svg_detail

/// Degree-of-efficiency chart: solid degree line, dashed band lines with the
/// confidence level in the legend, event overlays.
inline std::string render_degree_chart(const DegreeSeries& degree, const BandSeries& bands,
                                       const EventTable& events, const std::string& title) {
    using namespace svg_detail;
    if (degree.dates.empty()) throw std::invalid_argument("render_degree_chart: empty series");
    Frame f;
    f.first = degree.dates.front();
    f.n_months = degree.dates.back().diff(degree.dates.front()) + 1;
    double ymax = 0.0;
    for (double v : degree.zeta)
        if (std::isfinite(v)) ymax = std::max(ymax, v);
    for (double v : bands.upper) ymax = std::max(ymax, v);
    f.ymin = 0.0;
    f.ymax = std::max(ymax, 1e-6) * 1.08;

    std::ostringstream out;
    open_chart(out, title);
    append_events(out, f, events);
    append_axes(out, f);
    append_series_path(out, f, bands.upper, "#c0392b",
                       "stroke-width=\"1.2\" stroke-dasharray=\"5 4\"");
    append_series_path(out, f, bands.lower, "#c0392b",
                       "stroke-width=\"1.2\" stroke-dasharray=\"5 4\"");
    append_series_path(out, f, degree.zeta, "#1f6fb4", "stroke-width=\"1.6\"");
    const std::string band_text = percent_label(bands.level) + " confidence band";
    legend_entry(out, f.left + 10, f.top + 14, "#1f6fb4", "", "market efficiency degree");
    legend_entry(out, f.left + 10, f.top + 30, "#c0392b", "5 4", band_text);
    out << "</svg>\n";
    return out.str();
}

/// Raw monthly returns chart with the same event overlays.
inline std::string render_returns_chart(const ReturnSeries& returns, const EventTable& events,
                                        const std::string& title) {
    using namespace svg_detail;
    if (returns.dates.empty()) throw std::invalid_argument("render_returns_chart: empty series");
    Frame f;
    f.first = returns.dates.front();
    f.n_months = returns.dates.back().diff(returns.dates.front()) + 1;
    double lo = 0.0, hi = 0.0;
    for (double v : returns.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double pad = std::max(hi - lo, 1e-6) * 0.08;
    f.ymin = lo - pad;
    f.ymax = hi + pad;

    std::ostringstream out;
    open_chart(out, title);
    append_events(out, f, events);
    append_axes(out, f);
    out << "  <line x1=\"" << fx(f.left) << "\" y1=\"" << fx(f.y(0.0)) << "\" x2=\""
        << fx(f.width - f.right) << "\" y2=\"" << fx(f.y(0.0))
        << "\" stroke=\"#999999\" stroke-width=\"1\"/>\n";
    append_series_path(out, f, returns.values, "#1f6fb4", "stroke-width=\"1\"");
    legend_entry(out, f.left + 10, f.top + 14, "#1f6fb4", "", "monthly log return");
    out << "</svg>\n";
    return out.str();
}

}  // namespace mkteff
