#include "wwmon/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace wwmon::svg {

namespace {

constexpr double kLeft = 70;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 50;

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

struct Frame {
    Date x0;
    double x_span = 1;
    double y0 = 0, y1 = 1;
    double w = 0, h = 0;

    [[nodiscard]] double px(Date d) const { return kLeft + static_cast<double>(d - x0) / x_span * (w - kLeft - kRight); }
    [[nodiscard]] double py(double v) const { return h - kBottom - (v - y0) / (y1 - y0) * (h - kTop - kBottom); }
};

void extend(const DailySeries& s, Date& lo, Date& hi, double& ymin, double& ymax, bool& any) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (is_missing(s.values[i]) || !std::isfinite(s.values[i])) continue;
        const Date d = s.date_at(i);
        if (!any) lo = hi = d;
        lo = std::min(lo, d);
        hi = std::max(hi, d);
        ymin = std::min(ymin, s.values[i]);
        ymax = std::max(ymax, s.values[i]);
        any = true;
    }
}

void header(std::ostream& out, int w, int h, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 "
        << w << ' ' << h << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
        << escape(title) << "</text>\n";
}

// Polyline segments broken at missing values.
void path(std::ostream& out, const Frame& f, const DailySeries& s, const std::string& style) {
    bool open = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double v = s.values[i];
        if (is_missing(v) || !std::isfinite(v)) {
            if (open) out << "\" " << style << "/>\n";
            open = false;
            continue;
        }
        out << (open ? " L" : "<path d=\"M") << f.px(s.date_at(i)) << ',' << f.py(v);
        open = true;
    }
    if (open) out << "\" " << style << "/>\n";
}

}  // namespace

void write(std::ostream& out, const TimePlot& plot) {
    Date lo, hi;
    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -ymin;
    bool any = false;
    for (const auto& r : plot.ribbons) {
        extend(r.lower, lo, hi, ymin, ymax, any);
        extend(r.upper, lo, hi, ymin, ymax, any);
    }
    for (const auto& l : plot.lines) extend(l.series, lo, hi, ymin, ymax, any);
    for (const auto& p : plot.points) extend(p.series, lo, hi, ymin, ymax, any);
    if (!any) {
        ymin = 0;
        ymax = 1;
    }
    if (ymax <= ymin) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const double pad = 0.05 * (ymax - ymin);
    Frame f{lo, std::max<double>(1, static_cast<double>(hi - lo)), ymin - pad, ymax + pad,
            static_cast<double>(plot.width), static_cast<double>(plot.height)};

    out.precision(6);
    header(out, plot.width, plot.height, plot.title);
    out << "<g stroke=\"#444\" stroke-width=\"1\">\n"
        << "<line x1=\"" << kLeft << "\" y1=\"" << f.h - kBottom << "\" x2=\"" << f.w - kRight << "\" y2=\""
        << f.h - kBottom << "\"/>\n"
        << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << f.h - kBottom
        << "\"/>\n</g>\n";

    out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (int i = 0; i <= 4; ++i) {
        const double v = f.y0 + (f.y1 - f.y0) * i / 4.0;
        out << "<text x=\"" << kLeft - 6 << "\" y=\"" << f.py(v) + 4 << "\" text-anchor=\"end\">" << v << "</text>\n";
    }
    if (any) {
        for (int i = 0; i <= 4; ++i) {
            const Date d = lo + static_cast<std::int64_t>(std::llround(f.x_span * i / 4.0));
            out << "<text x=\"" << f.px(d) << "\" y=\"" << f.h - kBottom + 18 << "\" text-anchor=\"middle\">"
                << d.iso() << "</text>\n";
        }
    }
    out << "<text transform=\"translate(16," << f.h / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape(plot.y_label) << "</text>\n</g>\n";

    for (const auto& r : plot.ribbons) {
        // One closed polygon per contiguous run where both bounds exist.
        const std::size_t n = std::min(r.lower.size(), r.upper.size());
        std::size_t i = 0;
        while (i < n) {
            while (i < n && (is_missing(r.lower.values[i]) || is_missing(r.upper.values[i]))) ++i;
            const std::size_t a = i;
            while (i < n && !is_missing(r.lower.values[i]) && !is_missing(r.upper.values[i])) ++i;
            if (i == a) continue;
            out << "<polygon fill=\"" << r.colour << "\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
            for (std::size_t j = a; j < i; ++j) out << f.px(r.upper.date_at(j)) << ',' << f.py(r.upper.values[j]) << ' ';
            for (std::size_t j = i; j-- > a;) out << f.px(r.lower.date_at(j)) << ',' << f.py(r.lower.values[j]) << ' ';
            out << "\"/>\n";
        }
    }
    for (const auto& l : plot.lines) {
        std::string style = "fill=\"none\" stroke=\"" + l.colour + "\" stroke-width=\"1.5\"";
        if (l.dashed) style += " stroke-dasharray=\"5,4\"";
        path(out, f, l.series, style);
    }
    for (const auto& p : plot.points) {
        for (std::size_t i = 0; i < p.series.size(); ++i) {
            const double v = p.series.values[i];
            if (is_missing(v) || !std::isfinite(v)) continue;
            const bool alarm = i < p.flagged.size() && p.flagged[i];
            out << "<circle cx=\"" << f.px(p.series.date_at(i)) << "\" cy=\"" << f.py(v) << "\" r=\"2.5\" fill=\""
                << (alarm ? p.alarm_colour : p.colour) << "\"/>\n";
        }
    }
    out << "</svg>\n";
}

void write_bars(std::ostream& out, const std::string& title, const std::vector<Bar>& bars, int width, int height) {
    double ymax = 0.0;
    for (const auto& b : bars) {
        if (std::isfinite(b.value)) ymax = std::max(ymax, b.value);
    }
    if (ymax <= 0.0) ymax = 1.0;
    const double plot_w = width - kLeft - kRight;
    const double plot_h = height - kTop - kBottom;
    const double slot = bars.empty() ? plot_w : plot_w / static_cast<double>(bars.size());

    out.precision(6);
    header(out, width, height, title);
    out << "<line x1=\"" << kLeft << "\" y1=\"" << height - kBottom << "\" x2=\"" << width - kRight << "\" y2=\""
        << height - kBottom << "\" stroke=\"#444\"/>\n";
    out << "<g font-family=\"sans-serif\" font-size=\"10\">\n";
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const double v = std::isfinite(bars[i].value) ? std::max(0.0, bars[i].value) : 0.0;
        const double bh = v / ymax * plot_h;
        const double x = kLeft + slot * static_cast<double>(i);
        out << "<rect x=\"" << x + slot * 0.1 << "\" y=\"" << height - kBottom - bh << "\" width=\"" << slot * 0.8
            << "\" height=\"" << bh << "\" fill=\"#1f77b4\"/>\n";
        out << "<text transform=\"translate(" << x + slot / 2 << ',' << height - kBottom + 12
            << ") rotate(45)\">" << escape(bars[i].label) << "</text>\n";
    }
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + 4 << "\" text-anchor=\"end\">" << ymax << "</text>\n";
    out << "</g>\n</svg>\n";
}

}  // namespace wwmon::svg
